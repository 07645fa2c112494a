"""Norm engines for the concrete rearrangement-invariant spaces.

Every engine reads f only through the profile primitives (distribution,
rearrangement, band integrals), so ``norm(f) == norm(f*)`` by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BisectionFailure, DomainMismatch, NotEmbedded, Unclassifiable
from .generators import OrliczFn, QuasiConcaveFn
from .gauge import Gauge
from .measurable import Domain, PiecewiseFn, SeqFn, rearrange_step, star_integral
from .profiles import Composed
from .scalars import INF, Approx, exactify, is_exact, is_inf, mul0, power

DEFAULT_TOL = 1e-12
MAX_BISECT = 200


@dataclass(frozen=True)
class EvalResult:
    value: object
    method: str = "exact"  # exact | numeric
    err_bound: float = 0.0
    depth: int = 0

    @staticmethod
    def of(a: Approx, depth=0, force_numeric=False) -> "EvalResult":
        exact = a.exact and not force_numeric
        if is_inf(a.value):
            return EvalResult(INF, "exact", 0.0, depth)
        if exact:
            return EvalResult(a.value, "exact", 0.0, depth)
        return EvalResult(float(a.value), "numeric", max(float(a.err), 1e-300), depth)

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        from .scalars import to_json_scalar

        return {"value": to_json_scalar(self.value), "method": self.method,
                "err_bound": self.err_bound, "depth": self.depth}


# ---------------------------------------------------------------------------
# space descriptions
# ---------------------------------------------------------------------------


class SpaceSpec:
    domain: Domain
    kind = "space"

    def norm_approx(self, f, tol) -> Approx:  # pragma: no cover - abstract
        raise NotImplementedError

    def phi_limits(self):  # pragma: no cover - abstract
        raise NotImplementedError

    def phi(self, t) -> Approx:
        """Fundamental function φ_X(t)."""
        return self.norm_approx(indicator(self.domain, t), DEFAULT_TOL)


def indicator(domain: Domain, t):
    if domain is Domain.NATURALS:
        n = int(t)
        return SeqFn([1] * n)
    return PiecewiseFn.indicator(domain, 0, t)


@dataclass(frozen=True)
class Lp(SpaceSpec):
    p: object = 1
    domain: Domain = Domain.HALFLINE
    kind = "lp"

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError("Lp needs p ≥ 1")
        object.__setattr__(self, "p", exactify(self.p))

    def norm_approx(self, f, tol):
        if is_inf(self.p):
            return Approx(f.ess_sup())
        integral = f.band(Gauge.power(self.p), Fraction(0), INF)
        return _root(integral, self.p)

    def phi_limits(self):
        return Fraction(0), INF


@dataclass(frozen=True)
class Linf(SpaceSpec):
    domain: Domain = Domain.HALFLINE
    kind = "linf"

    def norm_approx(self, f, tol):
        return Approx(f.ess_sup())

    def phi_limits(self):
        return Fraction(1), Fraction(1)


@dataclass(frozen=True)
class Lorentz(SpaceSpec):
    phi_fn: QuasiConcaveFn = None
    domain: Domain = Domain.HALFLINE
    kind = "lorentz"

    def __post_init__(self):
        from .errors import InvalidGenerator

        if not self.phi_fn.is_concave():
            raise InvalidGenerator("Lorentz spaces need a concave increasing φ")

    def norm_approx(self, f, tol):
        phi = self.phi_fn
        if self.domain is Domain.NATURALS:
            return _lorentz_seq(f, phi)
        total = Approx(Fraction(0))
        c = f.star_inf()
        if c > 0:
            total = total + Approx(mul0(c, phi.phiInf))
            if is_inf(total.value):
                return total
        levels = [L for L in f.levels() if L >= c]
        for a, b in zip(levels, levels[1:]):
            if f.is_step:
                D = f.d(a)
                total = total + Approx(mul0(phi(D), b - a))
            else:
                total = total + _quad_layer(lambda lam: float(phi(f.d(lam))), a, b)
            if is_inf(total.value):
                return total
        return total

    def phi_limits(self):
        return self.phi_fn.limits()


@dataclass(frozen=True)
class Marcinkiewicz(SpaceSpec):
    phi_fn: QuasiConcaveFn = None
    domain: Domain = Domain.HALFLINE
    kind = "marcinkiewicz"

    def norm_approx(self, f, tol):
        if self.domain is Domain.NATURALS:
            return _marcinkiewicz_seq(f, self.phi_fn)
        return _marcinkiewicz_fn(f, self.phi_fn, tol)

    def phi_limits(self):
        return self.phi_fn.limits()


@dataclass(frozen=True)
class CalderonLozanovskii(SpaceSpec):
    base: SpaceSpec = None
    F: OrliczFn = None
    kind = "calderon_lozanovskii"

    @property
    def domain(self):
        return self.base.domain

    def modular(self, f, lam) -> Approx:
        """‖F(|f|/λ)‖ in the base space."""
        G = self.F.gauge().scaled(lam)
        if isinstance(self.base, Lp) and self.base.p == 1:
            return f.band(G, Fraction(0), INF)
        return self.base.norm_approx(Composed(f, G), DEFAULT_TOL)

    def norm_approx(self, f, tol):
        res = luxemburg(self, f, tol)
        return Approx(res.value, res.err_bound)

    def phi_limits(self):
        b0, binf = self.base.phi_limits()

        def lim(v):
            if v == 0:
                bF = self.F.bF
                return Fraction(0) if is_inf(bF) else 1 / bF
            if is_inf(v):
                return INF
            inv = self.F.inverse(1 / v)
            return INF if inv == 0 else 1 / inv

        return lim(b0), lim(binf)


@dataclass(frozen=True)
class SumLpLinf(SpaceSpec):
    p: object = 2
    domain: Domain = Domain.HALFLINE
    kind = "sum_lp_linf"

    def __post_init__(self):
        object.__setattr__(self, "p", exactify(self.p))

    def objective(self, f, c) -> Approx:
        """‖(|f| − c)_+‖_p + c."""
        integral = f.band(Gauge.power(self.p, shift=c), c, INF)
        if is_inf(integral.value):
            return Approx(INF)
        return _root(integral, self.p) + Approx(c)

    def norm_approx(self, f, tol):
        if self.p == 1:
            t = Fraction(1)
            return f.K(t) if self.domain is not Domain.NATURALS else Approx(f.ess_sup())
        lo = f.star_inf()
        top = f.ess_sup()
        c0 = max(lo, f.star(Fraction(1)) if self.domain is not Domain.UNIT else lo)
        h0 = self.objective(f, c0)
        if is_inf(h0.value):
            return Approx(INF)
        hi = min(top, h0.value)
        # exact values at the distribution levels, which is where the optimum sits for step f
        best = h0
        for L in f.levels():
            if lo <= L <= hi and not is_inf(L):
                v = self.objective(f, L)
                if v.value < best.value:
                    best = v
        if hi > lo:
            g = lambda c: float(self.objective(f, c).value)
            span = float(hi) - float(lo)
            r = minimize_scalar(g, bounds=(float(lo), float(hi)), method="bounded",
                                options={"xatol": max(1e-14, tol * span * 1e-2), "maxiter": 500})
            if r.fun < float(best.value):
                cstar = r.x
                v = self.objective(f, cstar)
                dx = max(1e-14, tol * span * 1e-2)
                wiggle = max(abs(float(self.objective(f, min(float(hi), cstar + dx)).value) - v.value),
                             abs(float(self.objective(f, max(float(lo), cstar - dx)).value) - v.value))
                best = Approx(v.value, v.err + wiggle + 1e-15 * abs(v.value))
        return best

    def footnote_norm(self, f) -> Approx:
        """(∫_0^1 f*^p)^{1/p}, equivalent (not equal) to the norm."""
        return _root(star_integral(f, Gauge.power(self.p), Fraction(0), Fraction(1)), self.p)

    def phi_limits(self):
        if self.domain is Domain.UNIT:
            return Fraction(0), Fraction(1)
        return Fraction(0), Fraction(1)


@dataclass(frozen=True)
class Intersection(SpaceSpec):
    left: SpaceSpec = None
    right: SpaceSpec = None
    kind = "intersection"

    def __post_init__(self):
        if self.left.domain != self.right.domain:
            raise DomainMismatch("intersection of spaces on different domains")

    @property
    def domain(self):
        return self.left.domain

    def norm_approx(self, f, tol):
        a = self.left.norm_approx(f, tol)
        b = self.right.norm_approx(f, tol)
        return a if a.value >= b.value else b

    def phi_limits(self):
        l0, linf = self.left.phi_limits()
        r0, rinf = self.right.phi_limits()
        return max(l0, r0), max(linf, rinf)


@dataclass(frozen=True)
class Cesaro(SpaceSpec):
    base: SpaceSpec = None
    kind = "cesaro"

    @property
    def domain(self):
        return self.base.domain

    def norm_approx(self, f, tol):
        from .cesaro import cesaro_apply

        return self.base.norm_approx(cesaro_apply(_concrete(f)), tol)

    def phi_limits(self):
        small = float(self.phi(Fraction(1, 10 ** 9)).value) if self.domain is not Domain.NATURALS else None
        return (Fraction(0) if small is not None and small < 1e-3 else None), None


def _concrete(f):
    from .errors import NotInClass

    if isinstance(f, (PiecewiseFn, SeqFn)):
        return f
    raise NotInClass("the Cesàro operator needs an explicit function, not a rearrangement view")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def norm(f, X: SpaceSpec, tol=DEFAULT_TOL) -> EvalResult:
    if f.domain != X.domain:
        raise DomainMismatch(f"function on {f.domain.value}, space on {X.domain.value}")
    a = X.norm_approx(f, tol)
    return EvalResult.of(a)


def fundamental(X: SpaceSpec, t) -> EvalResult:
    return norm(indicator(X.domain, t), X)


def phi_limits_space(X: SpaceSpec):
    return X.phi_limits()


def embed_norm_to_Linf(X: SpaceSpec) -> EvalResult:
    """‖id: X → L∞‖ = 1/φ_X(0⁺)."""
    phi0, _ = X.phi_limits()
    if phi0 is None or phi0 == 0:
        raise NotEmbedded("φ_X(0+) = 0, so X does not embed into L∞")
    v = 1 / phi0 if is_exact(phi0) else 1.0 / float(phi0)
    return EvalResult.of(Approx(v))


TRIVIAL, NONTRIVIAL, ALL = "trivial", "nontrivial", "all"


def oc_ideal_class(X: SpaceSpec) -> str:
    """Rule table for X_a: trivial, nontrivial or all of X."""
    seq = X.domain is Domain.NATURALS
    if isinstance(X, Lp):
        return ALL if not is_inf(X.p) else (NONTRIVIAL if seq else TRIVIAL)
    if isinstance(X, Linf):
        return NONTRIVIAL if seq else TRIVIAL
    if isinstance(X, Lorentz):
        phi0, phiInf = X.phi_fn.limits()
        if seq:
            return ALL if is_inf(phiInf) else NONTRIVIAL
        if phi0 > 0:
            return TRIVIAL
        if X.domain is Domain.UNIT:
            return ALL
        return ALL if is_inf(phiInf) else NONTRIVIAL
    if isinstance(X, Marcinkiewicz):
        phi0, _ = X.phi_fn.limits()
        if X.phi_fn.is_linear:
            return ALL
        if not seq and phi0 > 0:
            return TRIVIAL
        return NONTRIVIAL
    if isinstance(X, SumLpLinf):
        return ALL if X.domain is Domain.UNIT else NONTRIVIAL
    if isinstance(X, Intersection):
        a, b = oc_ideal_class(X.left), oc_ideal_class(X.right)
        if TRIVIAL in (a, b):
            return TRIVIAL
        return ALL if a == b == ALL else NONTRIVIAL
    if isinstance(X, CalderonLozanovskii):
        F = X.F
        if not is_inf(F.bF):
            return NONTRIVIAL if seq else TRIVIAL
        if F.power_exponent is not None:
            return oc_ideal_class(X.base)
        if not F.vanishes_only_at_zero:
            return NONTRIVIAL
        raise Unclassifiable("X_a of this Calderón–Lozanovskiĭ space depends on a Δ₂ condition")
    if isinstance(X, Cesaro):
        return oc_ideal_class(X.base)
    raise Unclassifiable(f"no rule for {type(X).__name__}")


def satisfies_d_infinity(X: SpaceSpec) -> bool:
    """Rule-table (𝒟_∞): restrictions to finite-measure sets are order continuous."""
    if X.domain is Domain.NATURALS:
        return True
    if isinstance(X, (Lp,)):
        return not is_inf(X.p)
    if isinstance(X, SumLpLinf):
        return True
    if isinstance(X, Lorentz):
        phi0, phiInf = X.phi_fn.limits()
        return phi0 == 0
    if isinstance(X, Intersection):
        return satisfies_d_infinity(X.left) and satisfies_d_infinity(X.right)
    if isinstance(X, CalderonLozanovskii):
        return X.F.power_exponent is not None and satisfies_d_infinity(X.base)
    return False


def linf_embeds(X: SpaceSpec) -> bool:
    _, phiInf = X.phi_limits()
    return phiInf is not None and not is_inf(phiInf)


# ---------------------------------------------------------------------------
# engines
# ---------------------------------------------------------------------------


def _root(a: Approx, p) -> Approx:
    if p == 1 or is_inf(a.value):
        return a
    v = a.value
    if is_exact(v) and is_exact(p) and Fraction(p).denominator == 1:
        r = _exact_root(Fraction(v), int(p))
        if r is not None:
            return Approx(r)
    inv = 1 / Fraction(p) if is_exact(p) else 1.0 / p
    val = float(v) ** float(inv)
    if a.err == 0:
        return Approx(val, 2e-16 * val)
    lo = max(float(v) - a.err, 0.0) ** float(inv)
    hi = (float(v) + a.err) ** float(inv)
    return Approx(val, max(hi - val, val - lo) + 2e-16 * val)


def _exact_root(v: Fraction, n: int):
    def iroot(k):
        r = round(k ** (1.0 / n)) if k < 2 ** 1000 else int(math.exp(math.log(k) / n))
        for c in (r - 1, r, r + 1):
            if c >= 0 and c ** n == k:
                return c
        return None

    a, b = iroot(v.numerator), iroot(v.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def _quad_layer(h, a, b) -> Approx:
    from scipy import integrate as spi

    lo = float(a)
    if is_inf(b):
        v1, v2 = h(max(lo, 1.0) * 1e8), h(max(lo, 1.0) * 1e12)
        if v2 > 0 and (v1 <= 0 or math.log(v2 / v1) / math.log(1e4) > -1 - 1e-3):
            return Approx(INF)
        val, err = spi.quad(h, lo, np.inf, limit=500, epsabs=1e-15, epsrel=1e-13)
    else:
        val, err = spi.quad(h, lo, float(b), limit=500, epsabs=1e-15, epsrel=1e-13)
    return Approx(val, max(err, 1e-15 * abs(val)))


def _lorentz_seq(x: SeqFn, phi) -> Approx:
    xs = x.rearranged()
    total = Approx(Fraction(0))
    prev = Fraction(0)
    for n, v in enumerate(xs.head, 1):
        cur = phi(Fraction(n))
        total = total + Approx(mul0(v, cur - prev))
        prev = cur
    e = xs.tail
    if e.is_zero:
        return total
    L = e.limit_inf()
    N = xs.N
    if L > 0:
        rest = phi.phiInf
        if is_inf(rest):
            return Approx(INF)
        total = total + Approx(mul0(L, rest - phi(Fraction(N))))
    if e.is_const:
        return total
    from .series import series_sum_fn

    def h(n):
        n = np.asarray(n, dtype=float)
        dphi = np.array([float(phi(k)) - float(phi(k - 1)) for k in n])
        return (e.array(n) - float(L)) * dphi

    return total + series_sum_fn(h, N + 1, INF)


def _marcinkiewicz_seq(x: SeqFn, phi) -> Approx:
    xs = x.rearranged()
    N = xs.N
    L = xs.star_inf()
    if L > 0 and is_inf(phi.phiInf):
        return Approx(INF)
    best = Approx(Fraction(0))
    s = Fraction(0)
    for n, v in enumerate(xs.head, 1):
        s = s + v
        r = Approx(phi(Fraction(n)) * s / n) if is_exact(phi(Fraction(n))) else Approx(float(phi(n)) * float(s) / n, 1e-15 * float(s))
        if r.value > best.value:
            best = r
    if xs.tail.is_zero:
        return best
    cands = sorted({int(round(v)) for v in np.geomspace(N + 1, 1e15, 200)} | set(range(N + 1, N + 200)))
    vals = []
    for n in cands:
        S = xs.partial_sum(n)
        vals.append((Approx(float(phi(n)) / n) * S, n))
    top = max(vals, key=lambda t: t[0].value)
    if top[0].value > best.value:
        best = top[0]
    i = [n for _, n in vals].index(top[1])
    lo = cands[max(0, i - 1)]
    hi = cands[min(len(cands) - 1, i + 1)]
    while hi - lo > 2:
        m1 = lo + (hi - lo) // 3
        m2 = hi - (hi - lo) // 3
        r1 = float(phi(m1)) / m1 * float(xs.partial_sum(m1).value)
        r2 = float(phi(m2)) / m2 * float(xs.partial_sum(m2).value)
        if r1 < r2:
            lo = m1
        else:
            hi = m2
    for n in range(lo, hi + 1):
        r = Approx(float(phi(n)) / n) * xs.partial_sum(n)
        if r.value > best.value:
            best = r
    if L > 0:
        lim = Approx(mul0(L, phi.phiInf))
        if lim.value > best.value:
            best = lim
    return best


def _marcinkiewicz_step(fs: PiecewiseFn, phi) -> Approx:
    """sup_t φ(t)K(t)/t for step f*: on a block of height v, R(t) = φ(t)(B/t + v)."""
    theta = phi.power_exponent
    best = Approx(Fraction(0))
    A = Fraction(0)
    for p in fs.pieces:
        s, e, v = p.lo, p.hi, p.expr.const_value()
        B = A - v * s
        if is_inf(e):
            if is_inf(phi.phiInf):
                return Approx(INF)
            cand = [Approx(mul0(v, phi.phiInf))]
        else:
            cand = [_exact_ratio(phi(e), A + v * (e - s), e)]
        if B > 0 and theta is not None and theta < 1:
            ts = float(B) * (1 - float(theta)) / (float(v) * float(theta)) if theta > 0 else None
            if ts is not None and float(s) < ts < float(e):
                val = float(phi(ts)) * (float(B) / ts + float(v))
                cand.append(Approx(val, 4e-16 * val))
        elif B > 0 and theta is None:
            hi = float(e) if not is_inf(e) else max(1.0, float(s)) * 1e12
            lo = float(s)
            pts = sorted({lo, hi, *[float(b) for b in phi.breakpoints() if lo < b < hi]})
            Rf = lambda t: float(phi(t)) * (float(B) / t + float(v))
            for b in phi.breakpoints():
                if s < b < e:
                    cand.append(_exact_ratio(phi(b), B + v * b, b))
            for a, b in zip(pts, pts[1:]):
                if a <= 0:
                    continue
                r = minimize_scalar(lambda t: -Rf(t), bounds=(a, b), method="bounded",
                                    options={"xatol": (b - a) * 1e-12, "maxiter": 300})
                val = -r.fun
                cand.append(Approx(val, 1e-13 * val))
        for c in cand:
            if c.value > best.value:
                best = c
            if is_inf(best.value):
                return best
        if not is_inf(e):
            A = A + v * (e - s)
    return best


def _exact_ratio(ph, K, t) -> Approx:
    if is_exact(ph):
        return Approx(ph * K / t)
    val = float(ph) * float(K) / float(t)
    return Approx(val, 4e-16 * val)


def _marcinkiewicz_fn(f, phi, tol) -> Approx:
    m = f.domain.measure
    if isinstance(f, PiecewiseFn) and f.is_step:
        return _marcinkiewicz_step(rearrange_step(f), phi)
    R = lambda t: Approx(phi(t)) * f.K(t) / Approx(t)
    ess = f.ess_sup()
    c = f.star_inf()
    # limits at the ends of the range
    if is_inf(ess) and phi.phi0 > 0:
        return Approx(INF)
    if c > 0 and is_inf(phi.phiInf) and is_inf(m):
        return Approx(INF)
    cands = set()
    for L in f.levels():
        if is_inf(L):
            continue
        for v in (f.d(L), f.d(L, strict=False)):
            if 0 < v < m and not is_inf(v):
                cands.add(v)
    cands.update(b for b in phi.breakpoints() if 0 < b < m)
    top = 1e12 if is_inf(m) else float(m)
    cands.update(np.geomspace(top * 1e-24 if not is_inf(m) else 1e-12, top, 60).tolist())
    if not is_inf(m):
        cands.add(m)
    cands = sorted(cands, key=float)
    vals = [R(t) for t in cands]
    best_i = max(range(len(vals)), key=lambda i: vals[i].value)
    best = vals[best_i]
    exact_best = best
    # refine around the three largest samples
    order = sorted(range(len(vals)), key=lambda i: vals[i].value, reverse=True)[:3]
    for i in order:
        a = float(cands[max(0, i - 1)])
        b = float(cands[min(len(cands) - 1, i + 1)])
        if b <= a:
            continue
        r = minimize_scalar(lambda t: -float(R(t).value), bounds=(a, b), method="bounded",
                            options={"xatol": max(1e-15, (b - a) * 1e-10), "maxiter": 300})
        v = R(r.x)
        if v.value > best.value * (1 + 1e-15):
            best = v
    # growth at 0⁺ and ∞ that sampling cannot see
    if is_inf(ess):
        probe = [R(x).value for x in (1e-30, 1e-60, 1e-90)]
        if probe[2] > probe[1] * (1 + 1e-6) and probe[1] > probe[0] * (1 + 1e-6):
            return Approx(INF)
        if max(probe) > best.value:
            best = Approx(max(probe), best.err)
    elif phi.phi0 > 0:
        lim = Approx(mul0(phi.phi0, ess))
        if lim.value > best.value:
            best = lim
    if is_inf(m):
        if c > 0:
            lim = Approx(mul0(c, phi.phiInf))
            if lim.value > best.value:
                best = lim
        else:
            probe = [R(x).value for x in (1e30, 1e60, 1e90)]
            if probe[2] > probe[1] * (1 + 1e-6) and probe[1] > probe[0] * (1 + 1e-6):
                return Approx(INF)
            if max(probe) > best.value:
                best = Approx(max(probe), best.err)
    if best is exact_best and best.exact:
        return best
    return Approx(best.value, best.err + 1e-15 * abs(float(best.value)))


def luxemburg(X: CalderonLozanovskii, f, tol=DEFAULT_TOL) -> EvalResult:
    """inf{λ > 0 : ‖F(|f|/λ)‖ ≤ 1} by bisection on the non-increasing modular."""
    ess = f.ess_sup()
    if ess == 0:
        return EvalResult(Fraction(0), "exact", 0.0, 0)
    bF = X.F.bF
    mod = lambda lam: X.modular(f, lam).value
    lo = None
    if not is_inf(bF):
        if is_inf(ess):
            return EvalResult(INF, "exact", 0.0, 0)
        lo = ess / bF
        if mod(lo) <= 1:
            return EvalResult.of(Approx(lo))
    hi = ess if not is_inf(ess) else Fraction(1)
    if is_inf(hi) or hi == 0:
        hi = Fraction(1)
    depth = 0
    while mod(hi) > 1:
        lo = hi
        hi = hi * 2
        depth += 1
        if depth > MAX_BISECT:
            return EvalResult(INF, "numeric", 0.0, depth)
    if lo is None:
        lo = hi
        while mod(lo) <= 1:
            hi = lo
            lo = lo / 2
            depth += 1
            if depth > MAX_BISECT:
                raise BisectionFailure("modular stays below 1 for every λ tried")
    lo, hi = float(lo), float(hi)
    while hi - lo > tol * max(1.0, hi):
        mid = (lo + hi) / 2
        if mod(mid) <= 1:
            hi = mid
        else:
            lo = mid
        depth += 1
        if depth > MAX_BISECT:
            raise BisectionFailure(f"no convergence after {MAX_BISECT} steps: bracket [{lo}, {hi}]")
    return EvalResult((lo + hi) / 2, "numeric", (hi - lo) / 2, depth)
