import math
import random
from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given
from scipy.integrate import quad

from rispaces import (INF, Domain, Linf, Lp, PiecewiseFn, SeqFn, SumLpLinf, bound_probe, c_at_zero, cesaro_apply,
                      cx_norm, rearrange)
from rispaces.errors import NotInClass

from conftest import seqs, step_fns

H = Domain.HALFLINE


def test_indicator_image():
    c = cesaro_apply(PiecewiseFn.indicator(H, 0, 1))
    for x in (Q(1, 3), Q(1), Q(5, 2), Q(100)):
        assert c(x) == min(1, 1 / x)
    c = cesaro_apply(PiecewiseFn.indicator(H, 3, INF))
    for x in (Q(1), Q(3), Q(4), Q(30)):
        assert c(x) == max(0, 1 - 3 / x)


def test_discrete_unit_vector():
    c = cesaro_apply(SeqFn([1]))
    assert [c(n) for n in (1, 2, 7, 1000)] == [1, Q(1, 2), Q(1, 7), pytest.approx(1e-3, rel=1e-14)]


def test_cx_norms():
    assert cx_norm(PiecewiseFn.indicator(H, 0, 1), Linf(H)).value == 1
    assert cx_norm(PiecewiseFn.indicator(H, 0, INF), SumLpLinf(2, H)).value == 1
    N = 10 ** 6
    partial = math.fsum(1.0 / n ** 2 for n in range(1, N + 1))
    r = cx_norm(SeqFn([1]), Lp(2, Domain.NATURALS))
    assert math.sqrt(partial) <= float(r.value) + r.err_bound + 1e-12
    assert float(r.value) <= math.sqrt(partial + 1.0 / N) + 1e-12
    assert float(r.value) == pytest.approx(math.pi / math.sqrt(6), abs=1e-12)


def test_c_at_zero():
    assert c_at_zero(PiecewiseFn.indicator(H, 0, Q(1, 10))) == 1
    assert c_at_zero(PiecewiseFn.indicator(H, 1, 2)) == 0
    assert c_at_zero(PiecewiseFn.indicator(H, 0, Q(1, 2), Q(7, 3))) == Q(7, 3)


def test_bound_probe():
    fam = [PiecewiseFn.indicator(H, 0, 1)]
    assert float(bound_probe(Lp(2, H), fam).value) == pytest.approx(math.sqrt(2), rel=1e-12)
    assert bound_probe(Linf(H), fam).value == 1
    assert bound_probe(Lp(1, H), fam).value == INF


def test_periodic_rejected():
    from rispaces import PeriodicTail

    f = PiecewiseFn(H, [], PeriodicTail(Q(0), Q(2), ((Q(0), Q(1), Q(1)),)))
    with pytest.raises(NotInClass):
        cesaro_apply(f)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@given(step_fns(H, signed=True, max_pieces=5))
def test_matches_quadrature(f):
    c = cesaro_apply(f)
    g = f.abs()
    cuts = sorted({float(p.lo) for p in g.pieces} | {float(p.hi) for p in g.pieces if p.hi != INF})
    rng = random.Random(0)
    for _ in range(40):
        x = rng.uniform(1e-3, 30)
        pts = [t for t in cuts if 0 < t < x]
        val = quad(lambda t: float(g(t)), 0, x, points=pts or None, limit=200, epsabs=1e-14, epsrel=1e-14)[0] / x
        assert float(c(x)) == pytest.approx(val, abs=1e-12)


@given(step_fns(H))
def test_star_below_cesaro_of_star(f):
    fs = rearrange(f)
    c = cesaro_apply(fs)
    for x in [Q(k, 7) for k in range(1, 150)]:
        assert fs(x) <= c(x)


@given(step_fns(H), step_fns(H))
def test_monotone(f, g):
    from rispaces.measurable import combine

    big = combine(f, g, "max")
    cf, cb = cesaro_apply(f), cesaro_apply(big)
    for x in [Q(k, 3) for k in range(1, 70)]:
        assert cf(x) <= cb(x)


@given(seqs(tail=False))
def test_discrete_matches_continuous(x):
    if all(v == 0 for v in x.head):
        return
    cd = cesaro_apply(x)
    cc = cesaro_apply(x.as_step_function())
    for n in range(1, len(x.head) + 8):
        assert cd(n) == cc(Q(n))


@given(seqs())
def test_discrete_tail_vs_prefix_sums(x):
    cd = cesaro_apply(x)
    vals = np.array([float(x(n)) for n in range(1, 3001)])
    brute = np.cumsum(vals) / np.arange(1, 3001)
    for n in (1, 5, 63, 64, 65, 500, 3000):
        assert float(cd(n)) == pytest.approx(brute[n - 1], abs=1e-12)
