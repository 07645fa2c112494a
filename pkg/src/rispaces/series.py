"""Sums of analytic sequences over long (possibly infinite) index ranges."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import integrate as spi
from scipy.special import zeta

from .expr import Expr
from .scalars import INF, Approx, is_exact, is_inf

DIRECT = 100_000
EXACT_LIMIT = 4000


def series_sum(h: Expr, n1: int, n2) -> Approx:
    """Σ_{n=n1}^{n2} h(n) for a non-negative Expr h (n2 may be ∞)."""
    if not is_inf(n2) and n2 < n1:
        return Approx(Fraction(0))
    if h.is_zero:
        return Approx(Fraction(0))
    if is_inf(n2):
        lim = h.limit_inf()
        if lim is None or lim != 0:
            return Approx(INF)
    else:
        count = n2 - n1 + 1
        if count <= EXACT_LIMIT and h.exact_capable:
            return Approx(sum((h(Fraction(n)) for n in range(n1, n2 + 1)), Fraction(0)))
        if count <= DIRECT:
            n = np.arange(n1, n2 + 1, dtype=float)
            vals = h.array(n)
            return Approx(float(math.fsum(vals)), 1e-15 * float(np.abs(vals).sum()) + 1e-300)
    z = _zeta_form(h, n1, n2)
    if z is not None:
        return z
    m = n1 + DIRECT
    if not is_inf(n2) and m >= n2:
        m = n2
    head = series_sum(h, n1, m - 1)
    return head + _euler_maclaurin(h, m, n2)


def _zeta_form(h: Expr, n1, n2):
    if len(h.terms) != 1 or h.terms[0].logk:
        return None
    t = h.terms[0]
    beta = -float(t.alpha)
    if beta <= 1:
        return Approx(INF) if is_inf(n2) and float(t.coef) > 0 else None
    s = float(t.shift)
    v = zeta(beta, n1 + s) - (0.0 if is_inf(n2) else zeta(beta, n2 + 1 + s))
    return Approx(float(t.coef) * v, 1e-14 * abs(float(t.coef) * v) + 1e-300)


def _euler_maclaurin(h: Expr, m: int, n2) -> Approx:
    """Σ_{n=m}^{n2} h(n) via the Euler–Maclaurin formula up to the h''' term."""
    d1 = h.derivative()
    d3 = d1.derivative().derivative()
    I = h.integrate(m, n2)
    ierr = 0.0
    if I is None:
        val, ierr = spi.quad(lambda x: float(h(x)), m, float(n2), limit=400)
        I = val
    if is_inf(I):
        return Approx(INF)
    hm = float(h(m))
    d1m, d3m = float(d1(m)), float(d3(m))
    if is_inf(n2):
        hn = d1n = d3n = 0.0
    else:
        hn, d1n, d3n = float(h(n2)), float(d1(n2)), float(d3(n2))
    corr = (hm + hn) / 2 + (d1n - d1m) / 12 - (d3n - d3m) / 720
    # next Euler–Maclaurin term is bounded by the size of the last one kept
    err = abs(d3n - d3m) / 720 + ierr + 1e-15 * abs(float(I))
    return Approx(float(I) + corr, err)


def series_sum_fn(h, n1: int, n2) -> Approx:
    """Σ_{n=n1}^{n2} h(n) for a smooth, eventually monotone vectorised callable h."""
    if not is_inf(n2) and n2 < n1:
        return Approx(0.0)
    last = n2 if not is_inf(n2) else n1 + DIRECT - 1
    stop = min(last, n1 + DIRECT - 1)
    n = np.arange(n1, stop + 1, dtype=float)
    vals = np.asarray(h(n), dtype=float)
    head = Approx(float(math.fsum(vals)), 1e-15 * float(np.abs(vals).sum()) + 1e-300)
    if stop == n2:
        return head
    m = stop + 1
    if is_inf(n2):
        big = np.array([1e8, 1e12, 1e16]) * max(1.0, m / 1e5)
        hb = np.abs(np.asarray(h(big), dtype=float))
        if np.all(hb > 0):
            slopes = np.diff(np.log(hb)) / np.diff(np.log(big))
            if slopes[-1] > -1.0 - 1e-3:
                return Approx(INF)
        elif hb[-1] > 0:
            return Approx(INF)
    f = lambda x: float(np.asarray(h(np.array([x])), dtype=float)[0])
    upper = np.inf if is_inf(n2) else float(n2)
    I, ierr = _quad_log(f, float(m), upper)
    hm = f(m)
    hn = 0.0 if is_inf(n2) else f(n2)
    step = max(1.0, m * 1e-3)
    d1m = (f(m + step) - f(m - step)) / (2 * step)
    d1n = 0.0
    if not is_inf(n2):
        d1n = (f(n2 + step) - f(n2 - step)) / (2 * step)
    corr = (hm + hn) / 2 + (d1n - d1m) / 12
    err = ierr + abs(d1n - d1m) / 12 * 1e-3 + 1e-14 * abs(I)
    return head + Approx(I + corr, err)


def _quad_log(f, a, b):
    """∫_a^b f over a long range by substituting x = e^u."""
    la = math.log(a)
    lb = math.inf if math.isinf(b) else math.log(b)
    g = lambda u: f(math.exp(u)) * math.exp(u)
    if math.isinf(lb):
        total, err = 0.0, 0.0
        lo = la
        while True:
            hi = lo + 10.0
            v, e = spi.quad(g, lo, hi, limit=200, epsabs=0, epsrel=1e-13)
            total += v
            err += e
            if abs(v) <= 1e-16 * max(abs(total), 1e-300) or hi > 700:
                break
            lo = hi
        return total, err
    return spi.quad(g, la, lb, limit=400, epsabs=0, epsrel=1e-13)
