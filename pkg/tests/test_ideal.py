from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from rispaces import (INF, Domain, Intersection, Linf, Lorentz, Lp, Marcinkiewicz, OrliczFn, Piece, PiecewiseFn,
                      QuasiConcaveFn, SeqFn, SumLpLinf, am_property_probe, build_witness, cesaro_copy_check,
                      discrete_oc_membership, dist_oc, hudzik_check, is_order_continuous, modular_domination_check,
                      norm, rearrange, trivial_ideal_copy_check, verify_witness)
from rispaces.errors import InfiniteModular, NotTrivialIdeal
from rispaces.ideal import discrete_oc_dist
from rispaces.measurable import combine

from conftest import seqs, step_fns

H, U, N = Domain.HALFLINE, Domain.UNIT, Domain.NATURALS
ONE = PiecewiseFn.indicator(H, 0, INF)
SUM2 = SumLpLinf(2, H)
M_SQRT = Marcinkiewicz(QuasiConcaveFn.power(Q(1, 2)), H)
M_SQRT_U = Marcinkiewicz(QuasiConcaveFn.power(Q(1, 2), end=Q(1)), U)
PSI = PiecewiseFn(U, [Piece.pow(Q(0), Q(1), Q(1, 2), Q(-1, 2))])


def test_dist_examples():
    f = PiecewiseFn.step(H, [(0, 1, 2), (1, INF, 1)])
    d = dist_oc(f, SUM2)
    assert d.value == 1 and d.path == "deJonge-closed-form"
    assert dist_oc(PiecewiseFn.step(H, [(0, 3, 5), (4, 9, 1)]), Lp(2, H)).value == 0
    d = dist_oc(ONE, Linf(H))
    assert d.value == 1 and d.path == "trivial-ideal"
    assert float(dist_oc(PSI, M_SQRT_U).value) == pytest.approx(1, abs=1e-6)


def test_dist_schedule_monotone():
    g = PiecewiseFn(H, [Piece.pow(Q(0), Q(1), Q(1, 2), Q(-1, 2))])
    d = dist_oc(g, M_SQRT)
    vals = [float(s) for _, s in d.schedule]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert float(d.value) <= float(norm(g, M_SQRT).value) + 1e-9


def test_order_continuity():
    assert is_order_continuous(PiecewiseFn.indicator(H, 0, 1), SUM2)
    assert not is_order_continuous(ONE, SUM2)
    assert is_order_continuous(SeqFn([1]), Linf(N))


def test_hudzik():
    assert hudzik_check(ONE, SUM2).overall
    assert not hudzik_check(PiecewiseFn.indicator(H, 0, 1), Lp(2, H)).overall
    assert hudzik_check(PSI, M_SQRT_U).overall


@pytest.mark.parametrize("b", [1, 10])
def test_cesaro_copy(b):
    rep = cesaro_copy_check(ONE, 0, b, SUM2)
    assert rep.overall
    assert any(fl.startswith("advisory") for fl in rep.flags)


def test_cesaro_copy_precondition():
    rep = cesaro_copy_check(PiecewiseFn.indicator(H, 0, 1), 0, 1, Lp(2, H))
    assert not rep.overall
    assert not rep.clauses[0].passed


def test_trivial_ideal_copy():
    assert trivial_ideal_copy_check(PiecewiseFn.indicator(H, 0, 1), Linf(H)).overall
    rep = trivial_ideal_copy_check(PiecewiseFn.indicator(H, 1, 2), Linf(H))
    assert not rep.overall and not rep.clauses[0].passed
    with pytest.raises(NotTrivialIdeal):
        trivial_ideal_copy_check(ONE, SUM2)


def test_witness_blocks():
    W = build_witness("disjoint-blocks", f=ONE, k=4)
    rep = verify_witness(W, SUM2, 1e-9, truncations=(10, 100))
    assert rep.overall
    assert len(rep.clauses) == 1 + 4 + (2 ** 4 - 4 - 1) + 2


def test_witness_marcinkiewicz():
    W = build_witness("marcinkiewicz", phi=QuasiConcaveFn.power(Q(1, 2), end=Q(1)), k=3, a=Q(1))
    for m in W.members:
        assert float(norm(m, M_SQRT_U).value) == pytest.approx(1, abs=1e-9)


def test_witness_flat_lorentz():
    phi = QuasiConcaveFn.saturating()
    W = build_witness("flat-lorentz", phi=phi, k=1)
    assert float(norm(W.members[0], Lorentz(phi, H)).value) == pytest.approx(1, abs=1e-9)


def test_am_probe():
    two = PiecewiseFn.indicator(H, 0, 1, 2)
    assert am_property_probe(ONE, two, SUM2).overall
    assert am_property_probe(PiecewiseFn.indicator(H, 0, 1), two, Lp(2, H)).overall


def test_modular_domination():
    f = PiecewiseFn.indicator(H, 0, 1)
    L1 = Lp(1, H)
    assert modular_domination_check(OrliczFn.power(2), L1, f, 2).overall
    assert not modular_domination_check(OrliczFn.power(2), L1, f, Q(3, 2)).overall
    assert modular_domination_check(OrliczFn.F_inf(), L1, f, 1).overall
    with pytest.raises(InfiniteModular):
        modular_domination_check(OrliczFn.power(1), L1, ONE, 1)


def test_discrete_membership():
    assert discrete_oc_membership(SeqFn([1]), Linf(N))
    assert not discrete_oc_membership(SeqFn.const_tail([], 1), Linf(N))
    assert float(discrete_oc_dist(SeqFn.const_tail([], 1), Linf(N)).value) == pytest.approx(1, abs=1e-9)
    assert discrete_oc_membership(SeqFn([3, 1, 4, 1, 5]), Lp(2, N))


SYM_SPACES = [SUM2, M_SQRT, Lorentz(QuasiConcaveFn.saturating(), H)]


@pytest.mark.parametrize("X", SYM_SPACES, ids=lambda X: X.kind)
@settings(max_examples=25)
@given(f=step_fns(H, signed=True, flat_tail=True))
def test_symmetry(X, f):
    a, b = dist_oc(f, X), dist_oc(rearrange(f), X)
    assert a.value == b.value or abs(float(a.value) - float(b.value)) <= 2e-6


@given(x=seqs())
def test_symmetry_sequences(x):
    assert dist_oc(x, Linf(N)).value == dist_oc(rearrange(x), Linf(N)).value


@pytest.mark.parametrize("X", [SUM2, M_SQRT], ids=lambda X: X.kind)
@settings(max_examples=25)
@given(f=step_fns(H, flat_tail=True), g=step_fns(H, flat_tail=True))
def test_monotone(X, f, g):
    big = combine(f, g, "max")
    assert float(dist_oc(f, X).value) <= float(dist_oc(big, X).value) + 2e-6


@settings(max_examples=25)
@given(f=step_fns(H, signed=True, flat_tail=True))
def test_modulus_invariance(f):
    assert dist_oc(f, SUM2).value == dist_oc(f.abs(), SUM2).value


@settings(max_examples=20)
@given(f=step_fns(H, flat_tail=True), m=st.sampled_from([4, 16, 64]))
def test_restricted_minimizer(f, m):
    d = dist_oc(f, SUM2)
    g = rearrange(f).restrict([(Q(1, m), Q(m))])
    diff = combine(rearrange(f), g, "sub")
    assert float(norm(diff, SUM2).value) >= float(d.value) - 1e-6
