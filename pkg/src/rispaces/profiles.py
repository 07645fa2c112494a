"""Lazy views of decreasing rearrangements.

A view answers the same primitive queries as a concrete function, so the norm
engines never need an explicit formula for f* when none exists.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InexactRearrangement, UnboundedRearrangement
from .measurable import (Domain, Piece, PiecewiseFn, Profile, SeqFn, is_nonincreasing_from_zero,
                         rearrange_step, star_integral)
from .scalars import INF, Approx, is_inf, mul0

DEFAULT_BRACKET_TOL = 1e-6


def max_depth() -> int:
    try:
        return max(1, int(os.environ.get("RISPACES_MAX_DEPTH", "20")))
    except ValueError:
        return 20


class Rearranged(Profile):
    """f* restricted to a finite union of s-intervals, glued together from the left."""

    def __init__(self, base, segments=None):
        self.base = base
        self.domain = base.domain
        if segments is None:
            segments = ((Fraction(0), base.domain.measure),)
        self.segments = tuple((u, v) for u, v in segments if u < v)

    def __repr__(self):
        return f"Rearranged({self.base!r}, {self.segments})"

    @property
    def is_step(self):
        return self.base.is_step

    @property
    def exact(self):
        return getattr(self.base, "exact", False)

    @property
    def length(self):
        return sum((v - u for u, v in self.segments), Fraction(0))

    def d(self, lam, strict=True):
        if not strict and lam <= 0:
            return self.length
        Db = self.base.d(lam, strict)
        total = Fraction(0)
        for u, v in self.segments:
            m = min(v, Db) - u
            if m > 0:
                total = total + m
        return total

    def star(self, s):
        for u, v in self.segments:
            L = v - u
            if s < L:
                return self.base.star(u + s)
            s = s - L
        return Fraction(0)

    def star_inf(self):
        if self.segments and is_inf(self.segments[-1][1]):
            return self.base.star_inf()
        return Fraction(0)

    def ess_sup(self):
        return self.star(Fraction(0)) if self.segments else Fraction(0)

    def levels(self):
        top = self.ess_sup()
        bot = self.star_inf()
        out = sorted({Fraction(0), *[L for L in self.base.levels() if bot <= L <= top and not is_inf(L)]}, key=float)
        if not is_inf(top) and top not in out:
            out.append(top)
        if is_inf(top):
            out.append(INF)
        return tuple(out)

    def band(self, G, a, b) -> Approx:
        lo_s = self.base.d(b, strict=False) if not is_inf(b) else Fraction(0)
        hi_s = self.base.d(a)
        total = Approx(Fraction(0))
        for u, v in self.segments:
            s1, s2 = max(u, lo_s), min(v, hi_s)
            if s1 < s2:
                total = total + star_integral(self.base, G, s1, s2)
                if is_inf(total.value):
                    return total
        return total

    def window(self, a, b) -> "Rearranged":
        return Rearranged(self.base, self._map([(Fraction(0), a), (b, INF)]))

    def complement_window(self, a, b) -> "Rearranged":
        return Rearranged(self.base, self._map([(a, b)]))

    def _map(self, keep):
        """Translate intervals of view coordinates into base coordinates."""
        out = []
        offset = Fraction(0)
        for u, v in self.segments:
            L = v - u
            for x, y in keep:
                lo, hi = max(x, offset), min(y, offset + L)
                if lo < hi:
                    out.append((u + (lo - offset), u + (hi - offset) if not is_inf(hi) else v))
            offset = offset + L
            if is_inf(offset):
                break
        return out

    def bracket(self, tol=DEFAULT_BRACKET_TOL, eps=None):
        return bracket(self, tol, eps)


class Composed(Profile):
    """|f| pushed through a gauge G: the profile of G(|f|)."""

    def __init__(self, base, G):
        self.base = base
        self.G = G
        self.domain = base.domain

    def __repr__(self):
        return f"Composed({self.base!r}, {self.G!r})"

    @property
    def is_step(self):
        return self.base.is_step

    @property
    def exact(self):
        return False

    def d(self, lam, strict=True):
        if lam < 0:
            return self.domain.measure
        if strict:
            return self.base.d(self.G.inverse(lam), True)
        if lam <= 0:
            return self.domain.measure
        cut = self.G.cutoff
        atc = self.G(cut) if not is_inf(cut) else INF
        if not is_inf(cut) and lam > atc:
            return self.base.d(cut, True)
        return self.base.d(self.G.inverse_lower(lam), False)

    def star(self, s):
        return self.G(self.base.star(s))

    def star_inf(self):
        return self.G(self.base.star_inf())

    def ess_sup(self):
        return self.G(self.base.ess_sup())

    def levels(self):
        vals = {Fraction(0)}
        for L in self.base.levels():
            v = self.G(L)
            vals.add(v)
        fin = sorted((v for v in vals if not is_inf(v)), key=float)
        if any(is_inf(v) for v in vals):
            fin.append(INF)
        return tuple(fin)

    def band(self, H, a, b) -> Approx:
        xa = self.G.inverse(a)
        chain = self.G.then(H)
        cut = self.G.cutoff
        if is_inf(b):
            total = self.base.band(chain, xa, cut)
            if not is_inf(cut):
                g = self.G(cut)
                if not is_inf(g) and g > a:
                    plateau = self.base.d(cut, False) - self.base.d(cut, True)
                    if plateau > 0:
                        total = total + Approx(mul0(H(g), plateau))
            return total
        xb = self.G.inverse_lower(b)
        return self.base.band(chain, xa, xb)


def rearrange(f, exact: bool = False):
    """Decreasing rearrangement.

    Step functions and already non-increasing functions come back as explicit
    ``PiecewiseFn``; sequences always do.  Anything else is returned as a lazy
    :class:`Rearranged` view (use ``.bracket`` for certified step envelopes).
    """
    if isinstance(f, SeqFn):
        return f.rearranged()
    if isinstance(f, (Rearranged,)):
        return f
    if isinstance(f, PiecewiseFn):
        if f.is_step:
            return rearrange_step(f)
        if is_nonincreasing_from_zero(f):
            return f.abs()
        if exact:
            if is_inf(f.ess_sup()):
                raise UnboundedRearrangement("f*(0+) = ∞ has no exact step representation")
            raise InexactRearrangement("f* is outside the exact class; use the bracket")
        return Rearranged(f)
    return Rearranged(f)


def window(f, a, b):
    """f·χ_{(0,a) ∪ (b,∞)}."""
    return f.window(a, b)


def complement_window(f, a, b):
    """f·χ_{(a,b)}."""
    return f.complement_window(a, b)


@dataclass(frozen=True)
class Bracket:
    lower: PiecewiseFn
    upper: PiecewiseFn
    eps: object
    gap: float
    estimate: PiecewiseFn


def bracket(prof, tol=DEFAULT_BRACKET_TOL, eps=None) -> Bracket:
    """Lower/upper step functions around f* on (eps, ∞) with sup-gap ≤ tol.

    The number of λ-levels is capped by 2**RISPACES_MAX_DEPTH; when the cap
    binds the achieved gap is reported instead.
    """
    if prof.domain is Domain.NATURALS:
        x = prof.rearranged() if isinstance(prof, SeqFn) else prof
        return Bracket(x, x, Fraction(0), 0.0, x)
    if eps is None:
        eps = Fraction(0) if not is_inf(prof.ess_sup()) else Fraction(1, 10 ** 9)
    lam_hi = float(prof.star(eps))
    lam_lo = float(prof.star_inf())
    cap = 2 ** max_depth()
    n = int(math.ceil((lam_hi - lam_lo) / tol)) if lam_hi > lam_lo else 1
    n = max(1, min(n, cap))
    grid = set(np.linspace(lam_lo, lam_hi, n + 1).tolist())
    grid.update(float(L) for L in prof.levels() if lam_lo <= float(L) <= lam_hi)
    lams = sorted(grid)
    gap = max((b - a for a, b in zip(lams, lams[1:])), default=0.0)
    ds = [float(prof.d(lam)) for lam in lams]
    lower, upper = [], []
    start = float(eps)
    # s in [d(λ_{j+1}), d(λ_j)) ⇒ λ_j ≤ f*(s) ≤ λ_{j+1}
    for j in range(len(lams) - 1):
        a, b = max(ds[j + 1], start), ds[j]
        if b > a:
            lower.append(Piece.const(a, b, lams[j]))
            upper.append(Piece.const(a, b, lams[j + 1]))
    lo_f = PiecewiseFn(prof.domain, _finish(lower, prof, lam_lo))
    up_f = PiecewiseFn(prof.domain, _finish(upper, prof, lam_lo))
    mids = [Piece.const(p.lo, p.hi, (p.expr.const_value() + q.expr.const_value()) / 2)
            for p, q in zip(lo_f.pieces, up_f.pieces)]
    return Bracket(lo_f, up_f, eps, gap, PiecewiseFn(prof.domain, mids))


def _finish(pieces, prof, lam_lo):
    out = sorted(pieces, key=lambda p: p.lo)
    end = out[-1].hi if out else 0.0
    if lam_lo > 0 and not is_inf(end):
        # the plateau at f*(∞) has infinite measure
        out.append(Piece.const(end, INF, lam_lo))
    return out
