"""Non-decreasing functions G: [0, ∞) → [0, ∞] with G(0) = 0.

They are the integrands of band integrals ∫ G(|f|) and the building block of
Orlicz modulars.  A gauge is zero up to its threshold, piecewise analytic up to
its cutoff and infinite beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .expr import Expr, Term
from .scalars import INF, is_exact, is_inf


@dataclass(frozen=True)
class Gauge:
    pieces: tuple  # ((lo, hi, Expr), ...) contiguous, starting at the threshold
    cutoff: object = INF
    at_cutoff: object = None  # value at x == cutoff when cutoff is finite

    # -- constructors -------------------------------------------------
    @staticmethod
    def identity() -> "Gauge":
        return Gauge(((Fraction(0), INF, Expr.pow(1, 1)),))

    @staticmethod
    def power(p, scale=1, shift=0, cutoff=INF, at_cutoff=None) -> "Gauge":
        """x ↦ scale·(x − shift)_+^p on [0, cutoff], ∞ beyond."""
        p = Fraction(p) if is_exact(p) else p
        e = Expr.make([Term(scale, p, -shift if is_exact(shift) else -float(shift))])
        if cutoff <= shift:
            return Gauge((), cutoff, 0 if at_cutoff is None else at_cutoff)
        if at_cutoff is None and not is_inf(cutoff):
            at_cutoff = e(cutoff)
        return Gauge(((shift, cutoff, e),), cutoff, at_cutoff)

    # -- inspection ---------------------------------------------------
    @property
    def threshold(self):
        return self.pieces[0][0] if self.pieces else self.cutoff

    def __call__(self, x):
        if is_inf(x):
            return INF
        if x > self.cutoff:
            return INF
        if x == self.cutoff and not is_inf(self.cutoff):
            return self.at_cutoff
        for lo, hi, e in self.pieces:
            if lo <= x < hi or (x == hi and is_inf(hi)):
                if x == lo and lo > 0:
                    return e.limit_at(lo) if e.limit_at(lo) is not None else e(x)
                return e(x) if x > 0 or not _singular(e, x) else e.limit_at(x)
        return Fraction(0) if is_exact(x) else 0.0

    def is_exact_at(self, x) -> bool:
        v = self(x)
        return is_exact(v)

    # -- transforms ---------------------------------------------------
    def scaled(self, lam) -> "Gauge":
        """x ↦ G(x / lam)."""
        exact = is_exact(lam)
        pieces = []
        for lo, hi, e in self.pieces:
            terms = []
            for t in e.terms:
                if t.alpha == 0 and t.logk == 0:
                    terms.append(t)
                    continue
                if t.logk:
                    raise ValueError("logarithmic gauges cannot be rescaled")
                if exact and is_exact(t.alpha) and Fraction(t.alpha).denominator == 1:
                    c = t.coef * Fraction(lam) ** (-int(t.alpha))
                else:
                    c = float(t.coef) * float(lam) ** (-float(t.alpha))
                terms.append(Term(c, t.alpha, t.shift * lam if exact else float(t.shift) * float(lam), 0))
            pieces.append((_m(lo, lam), _m(hi, lam), Expr.make(terms)))
        return Gauge(tuple(pieces), _m(self.cutoff, lam), self.at_cutoff)

    def then(self, outer: "Gauge") -> "ChainGauge":
        """x ↦ outer(self(x))."""
        return ChainGauge(self, outer)

    def compose_pieces(self, e: Expr, lo, hi):
        """Split (lo, hi) where a monotone e crosses gauge breakpoints.

        Yields (a, b, Expr-or-None) with the composed closed form when available,
        plus a flag telling that the gauge is infinite on that stretch.
        """
        yield from _compose_pieces(self, e, lo, hi)

    def inverse(self, y):
        """sup{x : G(x) ≤ y}."""
        if y < 0:
            return Fraction(0)
        if is_inf(y):
            return self.cutoff
        if not is_inf(self.cutoff) and self.at_cutoff is not None and y >= self.at_cutoff:
            return self.cutoff
        if y == 0:
            return self.threshold
        for lo, hi, e in self.pieces:
            top = e.limit_inf() if is_inf(hi) else e.limit_at(hi)
            if top is None or top > y or (is_inf(hi) and top >= y):
                return e.solve(y, lo, hi)
        return self.cutoff

    def inverse_lower(self, y):
        """inf{x : G(x) ≥ y}."""
        if y <= 0:
            return Fraction(0)
        if is_inf(y):
            return self.cutoff
        if not is_inf(self.cutoff) and self.at_cutoff is not None and y > self.at_cutoff:
            return self.cutoff
        for lo, hi, e in self.pieces:
            top = e.limit_inf() if is_inf(hi) else e.limit_at(hi)
            if top is None or top >= y:
                return e.solve(y, lo, hi)
        return self.cutoff


def _singular(e, x):
    return any(x + t.shift == 0 and (t.alpha < 0 or t.logk) for t in e.terms)


def _m(x, lam):
    if is_inf(x):
        return x
    if is_exact(x) and is_exact(lam):
        return x * lam
    return float(x) * float(lam)


@dataclass(frozen=True)
class ChainGauge:
    inner: object
    outer: object

    @property
    def cutoff(self):
        c = self.outer.cutoff
        return self.inner.inverse(c) if not is_inf(c) else self.inner.cutoff

    @property
    def threshold(self):
        return self.inner.inverse(self.outer.threshold)

    def __call__(self, x):
        v = self.inner(x)
        return INF if is_inf(v) else self.outer(v)

    def compose_pieces(self, e, lo, hi):
        for a, b, ce, infinite in _compose_pieces(self.inner, e, lo, hi):
            if infinite or ce is None:
                yield a, b, None, infinite
                continue
            yield from _compose_pieces(self.outer, ce, a, b)

    def inverse(self, y):
        return self.inner.inverse(self.outer.inverse(y))

    def inverse_lower(self, y):
        return self.inner.inverse_lower(self.outer.inverse_lower(y))


def _compose_expr(g: Expr, e: Expr) -> Optional[Expr]:
    """g∘e for gauge piece g, or None when the closed form leaves the class."""
    out = Expr.const(0)
    for t in g.terms:
        if t.alpha == 0 and t.logk == 0:
            out = out + Expr.const(t.coef)
            continue
        if t.logk:
            return None
        inner = e.add_const(t.shift)
        pw = inner.pow_real(t.alpha)
        if pw is None:
            return None
        out = out + pw.scale(t.coef)
    return out


def _compose_pieces(G, e: Expr, lo, hi):
    """Walk (lo, hi) along a monotone e, emitting stretches per gauge piece."""
    if lo >= hi:
        return
    v_lo = e.limit_at(lo) if lo != 0 or True else e(lo)
    v_hi = e.limit_inf() if is_inf(hi) else e.limit_at(hi)
    if v_lo is None or v_hi is None:
        yield lo, hi, None, False
        return
    increasing = v_hi >= v_lo
    # breakpoints in value space
    cuts = sorted({p[0] for p in G.pieces} | {p[1] for p in G.pieces} | {G.cutoff}, key=float)
    vmin, vmax = (v_lo, v_hi) if increasing else (v_hi, v_lo)
    inside = [c for c in cuts if vmin < c < vmax and not is_inf(c)]
    pts = [lo] + sorted((e.solve(c, lo, hi) for c in inside), key=float) + [hi]
    for a, b in zip(pts, pts[1:]):
        if not a < b:
            continue
        ma = e.limit_at(a)
        mb = e.limit_inf() if is_inf(b) else e.limit_at(b)
        if ma is None or mb is None:
            yield a, b, None, False
            continue
        mid_v = _mid(ma, mb)
        if mid_v > G.cutoff:
            yield a, b, None, True
            continue
        if mid_v <= G.threshold:
            yield a, b, Expr.const(0), False
            continue
        piece = next(p for p in G.pieces if p[0] <= mid_v <= p[1])
        yield a, b, _compose_expr(piece[2], e), False


def _mid(x, y):
    if is_inf(x) and is_inf(y):
        return x
    if is_inf(x) or is_inf(y):
        finite = y if is_inf(x) else x
        return finite * 2 + 1 if (x if is_inf(x) else y) > 0 else finite / 2
    return (x + y) / 2
