from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from rispaces import (INF, CalderonLozanovskii, Domain, Intersection, Linf, Lorentz, Lp, Marcinkiewicz, OrliczFn,
                      Piece, PiecewiseFn, QuasiConcaveFn, SumLpLinf, embed_norm_to_Linf, fundamental,
                      norm, oc_ideal_class, orlicz, rearrange)
from rispaces.errors import DomainMismatch, NotEmbedded
from rispaces.spaces import luxemburg

from conftest import step_fns

H, U = Domain.HALFLINE, Domain.UNIT
SQRT = QuasiConcaveFn.power(Q(1, 2))


def close(r, target, tol):
    return abs(float(r.value) - float(target)) <= tol + r.err_bound


def test_examples():
    assert norm(PiecewiseFn.indicator(H, 0, 4), Lp(2, H)).value == 2
    g = PiecewiseFn(U, [Piece.pow(Q(0), Q(1), Q(1, 2), Q(-1, 2))])
    assert close(norm(g, Marcinkiewicz(QuasiConcaveFn.power(Q(1, 2), end=Q(1)), U)), 1, 1e-12)
    assert norm(PiecewiseFn.indicator(H, 0, 5, 3), orlicz(OrliczFn.F_inf())).value == 3
    assert close(norm(PiecewiseFn.indicator(H, 0, INF), SumLpLinf(2, H)), 1, 1e-12)


def test_sum_norm_matches_cut_grid():
    X = SumLpLinf(2, H)
    f = PiecewiseFn.step(H, [(0, 1, 3), (1, 4, 2), (4, INF, Q(1, 2))])
    grid = min(float(X.objective(f, Q(k, 400)).value) for k in range(200, 1201))
    assert float(norm(f, X).value) == pytest.approx(grid, abs=1e-4)
    assert float(norm(f, X).value) <= grid + 1e-12


def test_fundamental():
    L = Lorentz(SQRT, H)
    for t in (Q(1, 2), Q(1), Q(7)):
        assert close(fundamental(L, t), float(t) ** 0.5, 1e-12)
    assert close(fundamental(Marcinkiewicz(SQRT, H), 4), 2, 1e-12)
    assert close(fundamental(Lp(3, H), 8), 2, 1e-12)


def test_oc_classes():
    assert oc_ideal_class(Linf(H)) == "trivial"
    assert oc_ideal_class(Lorentz(SQRT, H)) == "all"
    assert oc_ideal_class(SumLpLinf(2, H)) == "nontrivial"


def test_embedding_norms():
    assert embed_norm_to_Linf(Linf(H)).value == 1
    assert embed_norm_to_Linf(Intersection(Lp(2, H), Linf(H))).value == 1
    with pytest.raises(NotEmbedded):
        embed_norm_to_Linf(Lp(2, H))


def test_intersection_embedding_by_two_block_search():
    X = Intersection(Lp(2, H), Linf(H))
    best = 0.0
    for a in (Q(1, 100), Q(1, 10), Q(1), Q(10)):
        for h in (Q(1, 2), Q(1), Q(4)):
            f = PiecewiseFn.step(H, [(0, a, 1), (a, a + 1, h)])
            best = max(best, float(f.ess_sup()) / float(norm(f, X).value))
    assert best == pytest.approx(1.0)


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        norm(PiecewiseFn.indicator(U, 0, 1), Lp(2, H))


SPACES = [Lp(2, H), Lp(Q(3, 2), H), Linf(H), Lorentz(SQRT, H), Marcinkiewicz(SQRT, H), SumLpLinf(2, H),
          Intersection(Lp(2, H), Linf(H)), CalderonLozanovskii(Lp(1, H), OrliczFn.power(3)),
          CalderonLozanovskii(Lp(1, H), OrliczFn.F_p_inf(2))]


@pytest.mark.parametrize("X", SPACES, ids=lambda X: X.kind)
@given(f=step_fns(H, signed=True))
def test_rearrangement_invariance(X, f):
    a, b = norm(f, X), norm(rearrange(f), X)
    assert abs(float(a.value) - float(b.value)) <= a.err_bound + b.err_bound + 1e-12 * float(a.value)


@pytest.mark.parametrize("X", SPACES, ids=lambda X: X.kind)
@given(f=step_fns(H), s=st.fractions(Q(0), Q(1), max_denominator=10))
def test_ideal_property(X, f, s):
    g = f.scale(s)
    a, b = norm(g, X), norm(f, X)
    assert float(a.value) <= float(b.value) + a.err_bound + b.err_bound + 1e-12


@pytest.mark.parametrize("X", SPACES, ids=lambda X: X.kind)
@given(f=step_fns(H, signed=True), g=step_fns(H, signed=True), c=st.fractions(Q(-3), Q(3), max_denominator=5))
def test_triangle_and_homogeneity(X, f, g, c):
    from rispaces.measurable import combine

    nf, ng, ns = norm(f, X), norm(g, X), norm(combine(f, g, "add"), X)
    slack = nf.err_bound + ng.err_bound + ns.err_bound + 1e-12 * (1 + float(nf.value) + float(ng.value))
    assert float(ns.value) <= float(nf.value) + float(ng.value) + slack
    nc = norm(f.scale(c), X)
    assert float(nc.value) == pytest.approx(abs(float(c)) * float(nf.value), rel=1e-9, abs=nc.err_bound + 1e-12)


@pytest.mark.parametrize("X", [Lp(2, H), Lp(3, H), Lorentz(SQRT, H)], ids=lambda X: X.kind)
@given(f=step_fns(H))
def test_marcinkiewicz_is_largest(X, f):
    phi = {2: QuasiConcaveFn.power(Q(1, 2)), 3: QuasiConcaveFn.power(Q(1, 3))}.get(getattr(X, "p", None), SQRT)
    m, x = norm(f, Marcinkiewicz(phi, H)), norm(f, X)
    assert float(m.value) <= float(x.value) + m.err_bound + x.err_bound + 1e-12


@pytest.mark.parametrize("p", [Q(3, 2), 2, 3])
@given(f=step_fns(H))
def test_luxemburg_matches_lp(p, f):
    a = norm(f, orlicz(OrliczFn.power(p)))
    b = norm(f, Lp(p, H))
    assert float(a.value) == pytest.approx(float(b.value), rel=1e-9, abs=1e-12)


@given(f=step_fns(H, max_pieces=4))
def test_luxemburg_bracket(f):
    X = CalderonLozanovskii(Lp(1, H), OrliczFn.power(Q(5, 2)))
    r = luxemburg(X, f, 1e-10)
    if r.value == 0:
        return
    v, e = float(r.value), max(r.err_bound, 1e-12 * float(r.value))
    assert float(X.modular(f, Q(v + 2 * e)).value) <= 1 + 1e-9
    assert float(X.modular(f, Q(v - 2 * e)).value) >= 1 - 1e-9
