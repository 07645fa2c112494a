from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from rispaces import INF, Domain, Piece, PiecewiseFn, SeqFn, distribution, rearrange, tail_head, window
from rispaces.errors import InvalidFunction
from rispaces.profiles import complement_window

from conftest import seqs, step_fns

H = Domain.HALFLINE


def sort_by_height(f):
    """Brute-force f*: lay the blocks of |f| end to end in decreasing height."""
    blocks = sorted(((abs(p.expr.const_value()), p.hi - p.lo) for p in f.pieces), key=lambda b: -b[0])
    out, pos = [], Q(0)
    for h, ln in blocks:
        if h == 0:
            continue
        out.append((pos, pos + ln, h))
        pos = pos + ln
    return out


def blocks_of(g):
    res = []
    for p in g.pieces:
        v = p.expr.const_value()
        if res and res[-1][2] == v and res[-1][1] == p.lo:
            res[-1] = (res[-1][0], p.hi, v)
        elif v != 0:
            res.append((p.lo, p.hi, v))
    return res


def test_distribution_examples():
    f = PiecewiseFn.step(H, [(1, 2, 3), (4, 6, 1)])
    d = distribution(f)
    assert [d(lam) for lam in (0, Q(1, 2), 1, 2, 3, 7)] == [3, 3, 1, 1, 0, 0]
    assert distribution(PiecewiseFn.indicator(H, 0, INF))(Q(1, 2)) == INF
    assert distribution(PiecewiseFn.indicator(H, 0, INF))(1) == 0


def test_distribution_hyperbolic():
    f = PiecewiseFn(H, [Piece.hyp(Q(1), INF, 1, 0)])
    for lam in (Q(1, 10), Q(1, 2), Q(3, 4)):
        assert f.d(lam) == pytest.approx(float(1 / lam - 1), rel=1e-12)
    # grid count
    assert f.d(0.1) == pytest.approx(sum(1e-3 for k in range(1, 20_000) if 1 / (1 + k * 1e-3) > 0.1), abs=2e-3)
    assert f.d(1) == 0


def test_rearrange_examples():
    f = PiecewiseFn.step(H, [(1, 2, 3), (4, 6, 1)])
    assert blocks_of(rearrange(f)) == [(0, 1, 3), (1, 3, 1)]
    x = SeqFn([0, 2, 0, 1, 1])
    assert list(rearrange(x).head[:3]) == [2, 1, 1]
    assert all(v == 0 for v in rearrange(x).head[3:])
    g = PiecewiseFn.step(H, [(0, 1, 2), (1, INF, 1)])
    assert blocks_of(rearrange(g)) == [(0, 1, 2), (1, INF, 1)]
    assert rearrange(g).star_inf() == 1


def test_tail_head_examples():
    assert tail_head(PiecewiseFn.step(H, [(0, 1, 2), (1, INF, 1)])) == (1, 2)
    g = PiecewiseFn(Domain.UNIT, [Piece.pow(Q(0), Q(1), Q(1, 2), Q(-1, 2))])
    assert tail_head(g) == (0, INF)
    assert tail_head(SeqFn.hyp_tail([5], 1, 0)) == (0, 5)


def test_window_examples():
    one = PiecewiseFn.indicator(H, 0, INF)
    assert blocks_of(window(one, 0, 5)) == [(5, INF, 1)]
    fs = rearrange(PiecewiseFn.step(H, [(1, 2, 3), (4, 6, 1)]))
    assert blocks_of(window(fs, Q(1, 2), 2)) == [(0, Q(1, 2), 3), (2, 3, 1)]
    w = window(SeqFn([4, 3, 2, 1]), 0, 2)
    assert list(w.head[:2]) == [0, 0] and list(w.head[2:4]) == [2, 1]


def test_invalid_pieces():
    with pytest.raises(InvalidFunction):
        PiecewiseFn.step(H, [(0, 2, 1), (1, 3, 1)])
    with pytest.raises(InvalidFunction):
        PiecewiseFn.step(Domain.UNIT, [(0, 2, 1)])


@given(step_fns(H, signed=True, flat_tail=True))
def test_equimeasurable(f):
    fs = rearrange(f)
    for lam in (Q(0), Q(1, 3), Q(1), Q(2), Q(7, 2), Q(5)):
        assert fs.d(lam) == f.d(lam)


@given(step_fns(Domain.UNIT, signed=True))
def test_star_non_increasing(f):
    fs = rearrange(f)
    pts = [Q(k, 37) for k in range(1, 37)]
    vals = [fs.star(s) for s in pts]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


@given(step_fns(H, signed=True, max_pieces=12))
def test_sort_oracle(f):
    assert blocks_of(rearrange(f)) == [(a, b, v) for a, b, v in _merge(sort_by_height(f))]


def _merge(bl):
    out = []
    for a, b, v in bl:
        if out and out[-1][2] == v:
            out[-1] = (out[-1][0], b, v)
        else:
            out.append((a, b, v))
    return out


@given(step_fns(H, flat_tail=True), st.fractions(Q(0), Q(4), max_denominator=8),
       st.fractions(Q(4), Q(30), max_denominator=8))
def test_window_plus_complement(f, a, b):
    fs = rearrange(f)
    w, c = window(fs, a, b), complement_window(fs, a, b)
    for s in [Q(k, 5) for k in range(1, 200)]:
        assert w(s) + c(s) == fs(s)


@given(st.lists(st.integers(0, 9), min_size=1, max_size=12))
def test_seq_matches_step_embedding(xs):
    x = SeqFn(xs)
    xs_star = [v for v in rearrange(x).head if v != 0]
    assert [(k, k + 1, v) for k, v in enumerate(xs_star)] == \
        [(a, b, v) for a, b, v in _unit_blocks(rearrange(x.as_step_function()))]


def _unit_blocks(g):
    out = []
    for a, b, v in blocks_of(g):
        out += [(k, k + 1, v) for k in range(int(a), int(b))]
    return out


@given(seqs())
def test_seq_star_sorted(x):
    xs = rearrange(x)
    head = [xs(n) for n in range(1, 25)]
    assert head == sorted(head, reverse=True)
