"""Closed-form analytic pieces.

An :class:`Expr` is a finite sum of terms ``c·(t+s)^α·ln(t+s)^k``.  The public
piece kinds (constant, ``a/t + b``, ``c·t^α``) are special cases; the extra
generality keeps Cesàro images and generator derivatives in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .scalars import INF, exactify, is_exact, is_inf, is_integral, power


@dataclass(frozen=True)
class Term:
    coef: object
    alpha: object = Fraction(0)
    shift: object = Fraction(0)
    logk: int = 0

    @property
    def key(self):
        return (self.alpha, self.shift, self.logk)

    def __call__(self, t):
        u = t + self.shift
        if self.logk == 0:
            if self.alpha == 0:
                return self.coef
            if is_exact(self.coef):
                return _mul(self.coef, power(u, self.alpha))
            return self.coef * float(power(u, self.alpha))
        uf = float(u)
        if uf <= 0:
            return math.nan
        return float(self.coef) * float(power(uf, self.alpha)) * math.log(uf) ** self.logk

    def array(self, t):
        u = np.asarray(t, dtype=float) + float(self.shift)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = float(self.coef) * np.power(u, float(self.alpha))
            if self.logk:
                out = out * np.log(u) ** self.logk
        return out

    def growth(self):
        """Asymptotic order at u → ∞ as a comparable key."""
        return (self.alpha, self.logk)


def _mul(c, x):
    if c == 0:
        return c
    if is_inf(x):
        return INF if c > 0 else -INF
    return c * x


def _norm_scalar(x):
    return exactify(x)


@dataclass(frozen=True)
class Expr:
    terms: tuple = ()

    # -- construction -------------------------------------------------
    @staticmethod
    def make(terms) -> "Expr":
        acc: dict = {}
        order = []
        for t in terms:
            t = Term(_norm_scalar(t.coef), _norm_scalar(t.alpha), _norm_scalar(t.shift), int(t.logk))
            if t.alpha == 0 and t.logk == 0:
                t = Term(t.coef, Fraction(0), Fraction(0), 0)
            if t.key not in acc:
                acc[t.key] = t.coef
                order.append(t.key)
            else:
                acc[t.key] = acc[t.key] + t.coef
        out = [Term(acc[k], k[0], k[1], k[2]) for k in order if acc[k] != 0]
        out.sort(key=lambda t: (float(t.shift), -float(t.alpha), -t.logk))
        return Expr(tuple(out))

    @staticmethod
    def const(c) -> "Expr":
        return Expr.make([Term(c)])

    @staticmethod
    def hyp(a, b) -> "Expr":
        return Expr.make([Term(a, Fraction(-1)), Term(b)])

    @staticmethod
    def pow(c, alpha) -> "Expr":
        return Expr.make([Term(c, alpha)])

    # -- inspection ---------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_const(self) -> bool:
        return all(t.alpha == 0 and t.logk == 0 for t in self.terms)

    def const_value(self):
        return sum((t.coef for t in self.terms), Fraction(0))

    def kind(self):
        """Public kind name with params, or ``("expr", terms)``."""
        if self.is_const:
            return "const", [self.const_value()]
        if all(t.logk == 0 and t.shift == 0 for t in self.terms):
            alphas = {t.alpha for t in self.terms}
            if alphas <= {Fraction(0), Fraction(-1)}:
                a = sum((t.coef for t in self.terms if t.alpha == -1), Fraction(0))
                b = sum((t.coef for t in self.terms if t.alpha == 0), Fraction(0))
                return "hyp", [a, b]
            if len(self.terms) == 1:
                return "pow", [self.terms[0].coef, self.terms[0].alpha]
        return "expr", [[t.coef, t.alpha, t.shift, t.logk] for t in self.terms]

    @property
    def shifts(self):
        return {t.shift for t in self.terms if not (t.alpha == 0 and t.logk == 0)}

    @property
    def exact_capable(self) -> bool:
        return all(t.logk == 0 and is_integral(t.alpha) and is_exact(t.coef) and is_exact(t.shift)
                   for t in self.terms)

    # -- evaluation ---------------------------------------------------
    def __call__(self, t):
        if is_inf(t):
            return self.limit_inf()
        if is_exact(t) and self.exact_capable:
            s = Fraction(0)
            for term in self.terms:
                s = s + term(t) if not is_inf(s) else s
            return s
        return float(sum(float(term(float(t))) for term in self.terms)) if self.terms else Fraction(0)

    def array(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for term in self.terms:
            out = out + term.array(t)
        return out

    # -- algebra ------------------------------------------------------
    def __add__(self, other: "Expr") -> "Expr":
        return Expr.make(self.terms + other.terms)

    def __neg__(self) -> "Expr":
        return self.scale(-1)

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def scale(self, c) -> "Expr":
        c = _norm_scalar(c)
        return Expr.make([Term(c * t.coef if is_exact(c) and is_exact(t.coef) else float(c) * float(t.coef),
                               t.alpha, t.shift, t.logk) for t in self.terms])

    def add_const(self, c) -> "Expr":
        return self + Expr.const(c)

    def mul(self, other: "Expr") -> Optional["Expr"]:
        sh = self.shifts | other.shifts
        if len(sh) > 1:
            return None
        s = next(iter(sh)) if sh else Fraction(0)
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(Term(a.coef * b.coef, a.alpha + b.alpha, s, a.logk + b.logk))
        return Expr.make(out)

    def pow_int(self, n: int) -> Optional["Expr"]:
        result = Expr.const(1)
        for _ in range(n):
            result = result.mul(self)
            if result is None:
                return None
        return result

    def pow_real(self, p) -> Optional["Expr"]:
        """self**p for a single positive term without logarithms."""
        if is_integral(p) and 0 < int(p) <= 8:
            return self.pow_int(int(p))
        if len(self.terms) == 1 and self.terms[0].logk == 0:
            t = self.terms[0]
            if t.coef <= 0:
                return None
            c = power(t.coef, p) if t.alpha != 0 else power(t.coef, p)
            if t.alpha == 0:
                return Expr.const(c)
            return Expr.make([Term(c, t.alpha * p if is_exact(p) else float(t.alpha) * float(p), t.shift, 0)])
        if self.is_zero:
            return Expr.const(0)
        return None

    def substitute_shift(self, d) -> "Expr":
        """t ↦ self(t + d)."""
        return Expr.make([t if t.alpha == 0 and t.logk == 0 else Term(t.coef, t.alpha, t.shift + d, t.logk)
                          for t in self.terms])

    def divide_by_t(self) -> "Expr":
        out = []
        for t in self.terms:
            if t.shift != 0 and not (t.alpha == 0 and t.logk == 0):
                raise ValueError("division by t needs unshifted terms")
            out.append(Term(t.coef, t.alpha - 1, Fraction(0), t.logk))
        return Expr.make(out)

    # -- calculus -----------------------------------------------------
    def derivative(self) -> "Expr":
        out = []
        for t in self.terms:
            if t.alpha == 0 and t.logk == 0:
                continue
            if t.alpha != 0:
                out.append(Term(t.coef * t.alpha, t.alpha - 1, t.shift, t.logk))
            if t.logk:
                out.append(Term(t.coef * t.logk, t.alpha - 1, t.shift, t.logk - 1))
        return Expr.make(out)

    def antiderivative(self) -> "Expr":
        out = []
        for t in self.terms:
            out.extend(_anti(t.coef, t.alpha, t.shift, t.logk))
        return Expr.make(out)

    def integrate(self, a, b):
        """∫_a^b self; returns None when the closed form cannot be trusted."""
        if a == b:
            return Fraction(0)
        F = self.antiderivative()
        hi = F.limit_inf() if is_inf(b) else F.limit_at(b)
        lo = F.limit_at(a)
        if hi is None or lo is None:
            return None
        if is_inf(hi) and is_inf(lo):
            return None if hi == lo else hi
        if is_inf(lo):
            return -lo
        return hi - lo

    # -- limits -------------------------------------------------------
    def limit_at(self, x):
        """Limit from the inside at a finite point, allowing singular terms."""
        regular = []
        singular = []
        for t in self.terms:
            u = x + t.shift
            if u == 0 and (t.alpha < 0 or t.logk > 0):
                singular.append(t)
            elif u == 0:
                if t.alpha == 0 and t.logk == 0:
                    regular.append(t.coef)
            else:
                regular.append(t(x))
        if singular:
            worst = min(singular, key=lambda t: (t.alpha, -t.logk))
            same = [t for t in singular if (t.alpha, t.logk) == (worst.alpha, worst.logk)]
            c = sum(float(t.coef) for t in same)
            if c == 0:
                return None
            sign = 1 if c > 0 else -1
            if worst.logk % 2 == 1:
                sign = -sign
            return INF if sign > 0 else -INF
        total = Fraction(0)
        for v in regular:
            total = total + v if is_exact(total) and is_exact(v) else float(total) + float(v)
        return total

    def limit_inf(self):
        growing = [t for t in self.terms if t.alpha > 0 or (t.alpha == 0 and t.logk > 0)]
        const = sum((t.coef for t in self.terms if t.alpha == 0 and t.logk == 0), Fraction(0))
        if not growing:
            return const
        groups: dict = {}
        for t in growing:
            groups[t.growth()] = groups.get(t.growth(), 0) + float(t.coef)
        for key in sorted(groups, reverse=True):
            if groups[key] != 0:
                if len({t.shift for t in growing}) > 1 and abs(groups[key]) < 1e-12:
                    continue
                return INF if groups[key] > 0 else -INF
        if len({t.shift for t in growing}) == 1:
            return const
        v1, v2 = float(self(1e12)), float(self(1e15))
        if abs(v1 - v2) < 1e-6 * max(1.0, abs(v2)):
            return v2
        return None

    # -- inversion ----------------------------------------------------
    def solve(self, v, lo, hi):
        """Point in [lo, hi] where the monotone self equals v (clamped)."""
        v = _norm_scalar(v)
        nonconst = [t for t in self.terms if not (t.alpha == 0 and t.logk == 0)]
        if len(nonconst) == 1 and nonconst[0].logk == 0:
            t = nonconst[0]
            rest = v - sum((x.coef for x in self.terms if x.alpha == 0 and x.logk == 0), Fraction(0))
            q = rest / t.coef if is_exact(rest) and is_exact(t.coef) else float(rest) / float(t.coef)
            if q <= 0:
                u = 0.0 if t.alpha > 0 else INF
            elif t.alpha == 1:
                u = q
            elif t.alpha == -1:
                u = 1 / q
            else:
                u = float(q) ** (1.0 / float(t.alpha))
            x = u - t.shift if not is_inf(u) else u
            return min(max(x, lo), hi)
        f = lambda s: float(self(s)) - float(v)
        a = float(lo)
        b = float(hi)
        if math.isinf(b):
            b = max(2 * a, a + 1.0)
            fa = f(a if a > 0 else 1e-300)
            while f(b) * fa > 0 and b < 1e300:
                b *= 4
            if f(b) * fa > 0:
                return hi
        if a == 0:
            a = min(1e-300, b / 2)
        fa, fb = f(a), f(b)
        if fa == 0:
            return lo if a <= float(lo) else a
        if fb == 0:
            return b
        if fa * fb > 0:
            return lo if abs(fa) < abs(fb) else hi
        return brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    def __repr__(self):
        k, p = self.kind()
        return f"Expr({k}:{p})"


def _anti(c, alpha, shift, k):
    """Antiderivative of c·u^α·ln(u)^k as a list of terms."""
    if alpha == -1:
        return [Term(c / (k + 1) if is_exact(c) else float(c) / (k + 1), Fraction(0), shift, k + 1)]
    a1 = alpha + 1
    head = Term(c / a1 if is_exact(c) and is_exact(a1) else float(c) / float(a1), a1, shift, k)
    if k == 0:
        if alpha == 0:
            return [Term(c, Fraction(1), shift, 0)]
        return [head]
    sub_c = -(c * k / a1) if is_exact(c) and is_exact(a1) else -float(c) * k / float(a1)
    return [head] + _anti(sub_c, alpha, shift, k - 1)
