import math
import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from rispaces import INF, OrliczFn, QuasiConcaveFn, delta2_probe, eval_F, eval_phi, phi_derivative, phi_limits
from rispaces.errors import InvalidGenerator

PHIS = [QuasiConcaveFn.power(Q(1, 2)), QuasiConcaveFn.power(Q(1, 4)), QuasiConcaveFn.saturating(),
        QuasiConcaveFn.min_linear(), QuasiConcaveFn.min_linear(3)]


def test_phi_limits():
    assert phi_limits(QuasiConcaveFn.power(Q(1, 2))) == (0, INF)
    assert phi_limits(QuasiConcaveFn.saturating()) == (0, 1)
    assert eval_phi(QuasiConcaveFn.min_linear(), 2) == 1


def test_phi_derivative_closed_forms():
    d = phi_derivative(QuasiConcaveFn.power(Q(1, 2)))
    assert d(Q(1, 4)) == 1
    assert d(Q(4)) == Q(1, 4)
    d = phi_derivative(QuasiConcaveFn.min_linear())
    assert d(Q(1, 2)) == 1 and d(Q(2)) == 0


def test_saturating_derivative_finite_differences():
    phi = QuasiConcaveFn.saturating()
    d = phi_derivative(phi)
    for t in [0.1 * k for k in range(1, 11)]:
        h = 1e-6 * t
        fd = (float(eval_phi(phi, t + h)) - float(eval_phi(phi, t - h))) / (2 * h)
        assert float(d(t)) == pytest.approx(fd, rel=1e-6)
        assert float(d(t)) == pytest.approx(1 / (1 + t) ** 2, rel=1e-12)


@pytest.mark.parametrize("phi", PHIS, ids=lambda p: p.name)
def test_quasi_concave(phi):
    assert phi.quasi_concavity_spot_check(n=1000, seed=3)
    rng = random.Random(11)
    for _ in range(1000):
        s, t = rng.uniform(1e-3, 50), rng.uniform(1e-3, 50)
        assert float(eval_phi(phi, t)) <= max(1, t / s) * float(eval_phi(phi, s)) * (1 + 1e-12)


@pytest.mark.parametrize("phi", PHIS, ids=lambda p: p.name)
def test_derivative_integrates_back(phi):
    d = phi_derivative(phi)
    phi0 = phi_limits(phi)[0]
    for t in [Q(1, 2), Q(1), Q(3), Q(7)]:
        total = sum((p.expr.integrate(p.lo, min(p.hi, t)) for p in d.pieces if p.lo < t), Q(0))
        assert float(total) == pytest.approx(float(eval_phi(phi, t) - phi0), abs=1e-8)


def test_orlicz_values():
    assert eval_F(OrliczFn.power(2), 3) == 9
    assert eval_F(OrliczFn.F_inf(), 2) == INF
    assert eval_F(OrliczFn.F_inf(), Q(1, 2)) == 0
    assert eval_F(OrliczFn.F_p_inf(2), Q(1, 2)) == Q(1, 4)


@pytest.mark.parametrize("F", [OrliczFn.power(2), OrliczFn.power(Q(3, 2)), OrliczFn.F_inf(), OrliczFn.F_p_inf(1)])
def test_convexity(F):
    assert F.convexity_spot_check(n=1000, seed=5)


def test_nonconvex_rejected():
    from rispaces import Expr, Piece

    with pytest.raises(InvalidGenerator):
        OrliczFn((Piece(Q(0), INF, Expr.pow(1, Q(1, 2))),))


def test_delta2_probe_is_ratio():
    assert delta2_probe(OrliczFn.power(2)).value == pytest.approx(4)
    assert delta2_probe(OrliczFn.power(3), "at0").value == pytest.approx(8)


@given(st.floats(0.05, 0.95), st.floats(1e-3, 100), st.floats(1e-3, 100))
def test_power_quasi_concavity(theta, s, t):
    phi = QuasiConcaveFn.power(theta)
    assert float(eval_phi(phi, t)) <= max(1, t / s) * float(eval_phi(phi, s)) * (1 + 1e-12)
    assert math.isclose(float(eval_phi(phi, t)), t ** theta, rel_tol=1e-12)
