"""Measurable functions on (0,1), (0,∞) and ℕ.

Functions are finitely many analytic pieces plus a tail rule.  Everything the
norm engines need is phrased through a small set of primitives on |f|:

* ``d(lam, strict)``   measure of {|f| > lam} (or {|f| ≥ lam})
* ``star(s)``          the decreasing rearrangement f*(s), right-continuous
* ``star_inf()``       f*(∞)
* ``band(G, a, b)``    ∫ over {a < |f| < b} of G(|f|)
* ``levels()``         the values where d can jump or change its formula
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as spi
from scipy.optimize import brentq

from .errors import DomainMismatch, InvalidFunction, NotInClass
from .expr import Expr, Term
from .gauge import Gauge
from .scalars import INF, Approx, exactify, is_exact, is_inf, mul0, parse_scalar
from .series import series_sum, series_sum_fn

MAX_MATERIALIZE = 1_000_000
MAX_MERGE = 50_000


class Domain(Enum):
    UNIT = "unit"
    HALFLINE = "halfline"
    NATURALS = "naturals"

    @property
    def measure(self):
        return Fraction(1) if self is Domain.UNIT else INF

    @staticmethod
    def parse(x) -> "Domain":
        if isinstance(x, Domain):
            return x
        aliases = {"unit": Domain.UNIT, "(0,1)": Domain.UNIT, "halfline": Domain.HALFLINE,
                   "(0,inf)": Domain.HALFLINE, "naturals": Domain.NATURALS, "n": Domain.NATURALS}
        try:
            return aliases[str(x).lower()]
        except KeyError:
            raise ValueError(f"unknown domain {x!r}") from None


def same_domain(*objs):
    doms = {o.domain for o in objs}
    if len(doms) != 1:
        raise DomainMismatch(f"domains differ: {sorted(d.value for d in doms)}")
    return doms.pop()


@dataclass(frozen=True)
class Piece:
    lo: object
    hi: object
    expr: Expr

    @staticmethod
    def const(lo, hi, c) -> "Piece":
        return Piece(exactify(lo), exactify(hi), Expr.const(c))

    @staticmethod
    def hyp(lo, hi, a, b) -> "Piece":
        return Piece(exactify(lo), exactify(hi), Expr.hyp(a, b))

    @staticmethod
    def pow(lo, hi, c, alpha) -> "Piece":
        return Piece(exactify(lo), exactify(hi), Expr.pow(c, alpha))

    @property
    def length(self):
        return self.hi - self.lo

    def kind(self):
        return self.expr.kind()


@dataclass(frozen=True)
class PeriodicTail:
    """Step values repeating with a fixed period from ``start`` onwards.

    ``pattern`` holds (a, b, value) with 0 ≤ a < b ≤ period, offsets inside one period.
    """

    start: object
    period: object
    pattern: tuple

    def values(self):
        return [abs(v) for _, _, v in self.pattern]


@dataclass(frozen=True)
class _Mono:
    """A monotone, non-negative piece of |f|."""

    lo: object
    hi: object
    e: Expr
    dirn: int  # -1 decreasing, 0 constant, +1 increasing
    vlo: object
    vhi: object

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def top(self):
        return max(self.vlo, self.vhi)

    @property
    def bot(self):
        return min(self.vlo, self.vhi)

    def measure_above(self, lam, strict=True):
        if self.dirn == 0:
            c = self.vlo
            return self.length if (c > lam or (not strict and c >= lam)) else Fraction(0)
        if lam >= self.top:
            return Fraction(0)
        if lam <= self.bot:
            return self.length
        t = self.e.solve(lam, self.lo, self.hi)
        return (t - self.lo) if self.dirn < 0 else (self.hi - t)

    def position(self, lam):
        """Point where this piece takes the value lam."""
        return self.e.solve(lam, self.lo, self.hi)


class Profile:
    """Shared behaviour of everything the norm engines can consume."""

    domain: Domain
    exact = True

    # subclasses provide d, star, star_inf, ess_sup, band, levels, is_step

    def d_ge(self, lam):
        return self.d(lam, strict=False)

    def tail_head(self):
        return self.star_inf(), self.ess_sup()

    def K(self, t) -> Approx:
        """∫_0^t f*."""
        return star_integral(self, Gauge.identity(), Fraction(0), t)


def star_integral(prof, G, s1, s2) -> Approx:
    """∫_{s1}^{s2} G(f*(s)) ds, through band integrals plus the two end plateaus."""
    if not s2 > s1:
        return Approx(Fraction(0))
    lam1 = prof.star(s1)
    lam2 = prof.star_inf() if is_inf(s2) else prof.star(s2)
    if lam1 == lam2:
        return Approx(mul0(G(lam1), s2 - s1))
    total = Approx(Fraction(0))
    dg1 = prof.d(lam1, strict=False) if not is_inf(lam1) else Fraction(0)
    m1 = min(s2, dg1) - s1
    if m1 > 0:
        total = total + Approx(mul0(G(lam1), m1))
    d2 = prof.d(lam2)
    if not is_inf(d2):
        m2 = s2 - max(s1, d2)
        if m2 > 0:
            total = total + Approx(mul0(G(lam2), m2))
    return total + prof.band(G, lam2, lam1)


# ---------------------------------------------------------------------------
# functions on (0,1) and (0,∞)
# ---------------------------------------------------------------------------


class PiecewiseFn(Profile):
    """Finitely many analytic pieces on contiguous intervals, zero in any gaps."""

    def __init__(self, domain, pieces: Sequence[Piece] = (), periodic: Optional[PeriodicTail] = None):
        self.domain = Domain.parse(domain)
        if self.domain is Domain.NATURALS:
            raise DomainMismatch("use SeqFn for sequences")
        ps = sorted((p for p in pieces if p.lo != p.hi), key=lambda p: float(p.lo))
        top = self.domain.measure
        prev = Fraction(0)
        for i, p in enumerate(ps):
            if not p.lo < p.hi:
                raise InvalidFunction(f"piece {i}: need lo < hi, got ({p.lo}, {p.hi})")
            if p.lo < 0 or p.lo < prev:
                raise InvalidFunction(f"piece {i}: overlapping or negative interval")
            if p.hi > top:
                raise InvalidFunction(f"piece {i}: leaves the domain")
            if is_inf(p.hi) and i != len(ps) - 1:
                raise InvalidFunction("only the last piece may be unbounded")
            for t in p.expr.terms:
                needs_pos = t.logk or not (t.alpha == int(t.alpha) if is_exact(t.alpha) else float(t.alpha).is_integer())
                if (t.alpha != 0 or t.logk) and p.lo + t.shift < 0 and needs_pos:
                    raise InvalidFunction(f"piece {i}: term undefined on the interval")
            if p.lo > 0:
                v = p.expr.limit_at(p.lo)
                if v is None or is_inf(v):
                    raise InvalidFunction(f"piece {i}: value not finite on ({p.lo}, {p.hi})")
            prev = p.hi
        if periodic is not None:
            if self.domain is not Domain.HALFLINE:
                raise InvalidFunction("periodic tails live on the half-line")
            if ps and (is_inf(ps[-1].hi) or ps[-1].hi > periodic.start):
                raise InvalidFunction("periodic tail overlaps the pieces")
        self.pieces = tuple(ps)
        self.periodic = periodic

    # -- constructors -------------------------------------------------
    @staticmethod
    def step(domain, blocks, periodic=None) -> "PiecewiseFn":
        """blocks: iterable of (lo, hi, value)."""
        return PiecewiseFn(domain, [Piece.const(a, b, parse_scalar(c) if isinstance(c, str) else exactify(c))
                                    for a, b, c in blocks], periodic)

    @staticmethod
    def indicator(domain, a, b, c=1) -> "PiecewiseFn":
        return PiecewiseFn.step(domain, [(a, b, c)])

    def __repr__(self):
        body = ", ".join(f"({p.lo},{p.hi}):{p.expr}" for p in self.pieces)
        tail = f", periodic={self.periodic}" if self.periodic else ""
        return f"PiecewiseFn({self.domain.value}; {body}{tail})"

    def __eq__(self, other):
        return (isinstance(other, PiecewiseFn) and self.domain == other.domain
                and self.pieces == other.pieces and self.periodic == other.periodic)

    def __hash__(self):
        return hash((self.domain, self.pieces, self.periodic))

    # -- pointwise ----------------------------------------------------
    def __call__(self, t):
        for p in self.pieces:
            if p.lo < t < p.hi or (t == p.lo and t > 0):
                return p.expr(t)
        if self.periodic is not None and t >= self.periodic.start:
            r = (t - self.periodic.start) % self.periodic.period
            for a, b, v in self.periodic.pattern:
                if a <= r < b:
                    return v
        return Fraction(0)

    @property
    def is_step(self) -> bool:
        return all(p.expr.is_const for p in self.pieces)

    @property
    def exact(self) -> bool:
        return all(p.expr.exact_capable for p in self.pieces)

    @cached_property
    def support_end(self):
        if self.periodic is not None:
            return INF
        nz = [p for p in self.pieces if not p.expr.is_zero]
        return nz[-1].hi if nz else Fraction(0)

    def abs(self) -> "PiecewiseFn":
        pieces = [Piece(m.lo, m.hi, m.e) for m in self._mono]
        per = None
        if self.periodic is not None:
            per = PeriodicTail(self.periodic.start, self.periodic.period,
                               tuple((a, b, abs(v)) for a, b, v in self.periodic.pattern))
        return PiecewiseFn(self.domain, pieces, per)

    # -- monotone decomposition --------------------------------------
    @cached_property
    def _mono(self):
        out = []
        for p in self.pieces:
            for lo, hi in _monotone_split(p.expr, p.lo, p.hi):
                for lo2, hi2 in _sign_split(p.expr, lo, hi):
                    out.append(_make_mono(p.expr, lo2, hi2))
        return tuple(m for m in out if not (m.dirn == 0 and m.vlo == 0))

    @cached_property
    def _pattern(self):
        if self.periodic is None:
            return ()
        return tuple(v for v in self.periodic.values() if v > 0)

    # -- primitives ---------------------------------------------------
    def d(self, lam, strict=True):
        if not strict and lam <= 0:
            return self.domain.measure
        if is_inf(lam):
            return Fraction(0)
        total = Fraction(0)
        for m in self._mono:
            total = total + m.measure_above(lam, strict)
            if is_inf(total):
                return INF
        for v in self._pattern:
            if v > lam or (not strict and v >= lam):
                return INF
        return total

    @cached_property
    def _levels(self):
        vals = {Fraction(0)}
        for m in self._mono:
            for v in (m.vlo, m.vhi):
                if not is_inf(v):
                    vals.add(v)
        vals.update(self._pattern)
        out = sorted(vals, key=float)
        if self.ess_sup() == INF:
            out.append(INF)
        return tuple(out)

    def levels(self):
        return self._levels

    @cached_property
    def _ess_sup(self):
        vals = [m.top for m in self._mono] + list(self._pattern)
        return max(vals) if vals else Fraction(0)

    def ess_sup(self):
        return self._ess_sup

    def star_inf(self):
        if self.domain is Domain.UNIT:
            return Fraction(0)
        vals = list(self._pattern)
        if self._mono and is_inf(self._mono[-1].hi):
            m = self._mono[-1]
            vals.append(m.vhi)
        return max(vals) if vals else Fraction(0)

    @cached_property
    def _level_table(self):
        return tuple((L, self.d(L)) for L in self._levels)

    def star(self, s):
        if s >= self.domain.measure:
            return Fraction(0)
        table = self._level_table
        i = next(k for k, (_, D) in enumerate(table) if D <= s)
        if i == 0:
            return table[0][0]
        a, b = table[i - 1][0], table[i][0]
        if self.d(b, strict=False) > s:
            return b
        return self._cross(a, b, s)

    def _cross(self, a, b, s):
        """The λ in (a, b) with d(λ) = s, where d is continuous."""
        spanning = [m for m in self._mono if m.dirn != 0 and m.bot <= a and m.top >= b]
        mid = _mid(a, b)
        if len(spanning) == 1:
            m = spanning[0]
            r = s - (self.d(mid) - m.measure_above(mid))
            t = m.lo + r if m.dirn < 0 else m.hi - r
            return m.e(t)
        f = lambda lam: float(self.d(lam)) - float(s)
        lo, hi = float(a), float(b)
        if math.isinf(hi):
            hi = max(1.0, 2 * lo)
            while f(hi) > 0:
                hi *= 2
        return brentq(f, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)

    def band(self, G, a, b) -> Approx:
        total = Approx(Fraction(0))
        for m in self._mono:
            total = total + _mono_band(m, G, a, b)
            if is_inf(total.value):
                return total
        for v in self._pattern:
            if a < v < b and G(v) > 0:
                return Approx(INF)
        return total

    def distribution(self) -> "DistributionCurve":
        return DistributionCurve(self)

    # -- structure ----------------------------------------------------
    def restrict(self, intervals) -> "PiecewiseFn":
        """f·χ_U for U a finite union of intervals (x, y)."""
        out = []
        for p in self.pieces:
            for x, y in intervals:
                lo, hi = max(p.lo, x), min(p.hi, y)
                if lo < hi:
                    out.append(Piece(lo, hi, p.expr))
        per = None
        if self.periodic is not None:
            keep_tail = [(x, y) for x, y in intervals if is_inf(y)]
            finite = [(x, y) for x, y in intervals if not is_inf(y)]
            mat = _materialize(self.periodic, max([y for _, y in finite] + [x for x, _ in keep_tail]
                                                  + [self.periodic.start]))
            for q in mat[0]:
                for x, y in intervals:
                    lo, hi = max(q.lo, x), min(q.hi, y)
                    if lo < hi:
                        out.append(Piece(lo, hi, q.expr))
            if keep_tail:
                per = mat[1]
        return PiecewiseFn(self.domain, _merge_pieces(out), per)

    def window(self, a, b) -> "PiecewiseFn":
        return self.restrict([(Fraction(0), a), (b, INF)])

    def complement_window(self, a, b) -> "PiecewiseFn":
        return self.restrict([(a, b)])

    def scale(self, c) -> "PiecewiseFn":
        c = exactify(c)
        per = None
        if self.periodic is not None:
            per = PeriodicTail(self.periodic.start, self.periodic.period,
                               tuple((a, b, v * c) for a, b, v in self.periodic.pattern))
        return PiecewiseFn(self.domain, [Piece(p.lo, p.hi, p.expr.scale(c)) for p in self.pieces], per)

    def breakpoints(self):
        pts = {Fraction(0)}
        for p in self.pieces:
            pts.update((p.lo, p.hi))
        return sorted((x for x in pts if not is_inf(x)), key=float)


def _mid(a, b):
    if is_inf(b):
        return 2 * a + 1
    return (a + b) / 2


def _make_mono(e: Expr, lo, hi) -> _Mono:
    vlo = e.limit_at(lo)
    vhi = e.limit_inf() if is_inf(hi) else e.limit_at(hi)
    if e.is_const:
        c = abs(e.const_value())
        return _Mono(lo, hi, Expr.const(c), 0, c, c)
    if vlo is None or vhi is None:
        vlo = e(lo if lo > 0 else 1e-300) if vlo is None else vlo
        vhi = e(hi if not is_inf(hi) else 1e300) if vhi is None else vhi
    mid = _mid(lo, hi)
    if float(e(mid)) < 0 or (vlo + vhi < 0 if not (is_inf(vlo) and is_inf(vhi)) else vlo < 0):
        e, vlo, vhi = -e, -vlo, -vhi
    if vlo == vhi:
        return _Mono(lo, hi, e, 0, vlo, vhi)
    return _Mono(lo, hi, e, -1 if vhi < vlo else 1, vlo, vhi)


def _simple(e: Expr) -> bool:
    nonconst = [t for t in e.terms if not (t.alpha == 0 and t.logk == 0)]
    return len(nonconst) <= 1 and all(t.logk == 0 for t in nonconst)


def _grid(lo, hi, n=400):
    a = float(lo)
    if is_inf(hi):
        start = a if a > 0 else 1e-12
        return np.unique(np.concatenate([np.geomspace(start, start * 1e18 + 1e18, n),
                                         np.linspace(a, a + 100, n)[1:]]))
    b = float(hi)
    pts = np.linspace(a, b, n)
    if a == 0:
        pts = np.concatenate([np.geomspace(b * 1e-15, b, n), pts])
    else:
        pts = np.concatenate([a + np.geomspace((b - a) * 1e-12, b - a, n), pts])
    return np.unique(pts[(pts > a) & (pts < b)])


def _roots(e: Expr, lo, hi):
    """Sign changes of e strictly inside (lo, hi), located by sampling + bisection."""
    ts = _grid(lo, hi)
    vals = e.array(ts)
    out = []
    for i in range(len(ts) - 1):
        if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]) and vals[i] * vals[i + 1] < 0:
            out.append(brentq(lambda x: float(e(x)), ts[i], ts[i + 1], xtol=1e-300, rtol=1e-15))
    return out


def _monotone_split(e: Expr, lo, hi):
    if _simple(e) or e.is_const:
        return [(lo, hi)]
    cuts = [exactify(r) for r in _roots(e.derivative(), lo, hi)]
    pts = [lo] + cuts + [hi]
    return [(a, b) for a, b in zip(pts, pts[1:]) if a < b]


def _sign_split(e: Expr, lo, hi):
    if e.is_const:
        return [(lo, hi)]
    vlo = e.limit_at(lo)
    vhi = e.limit_inf() if is_inf(hi) else e.limit_at(hi)
    if vlo is None or vhi is None or not (vlo < 0 < vhi or vhi < 0 < vlo):
        return [(lo, hi)]
    z = e.solve(0, lo, hi)
    return [(lo, z), (z, hi)]


def _mono_band(m: _Mono, G, a, b) -> Approx:
    if m.dirn == 0:
        c = m.vlo
        if a < c < b:
            g = G(c)
            if g == 0:
                return Approx(Fraction(0))
            return Approx(mul0(g, m.length))
        return Approx(Fraction(0))
    lo_v, hi_v = max(a, m.bot), min(b, m.top)
    if not lo_v < hi_v:
        return Approx(Fraction(0))
    p_hi = m.lo if hi_v == m.top and m.dirn < 0 else (m.hi if hi_v == m.top else m.position(hi_v))
    p_lo = m.hi if lo_v == m.bot and m.dirn < 0 else (m.lo if lo_v == m.bot else m.position(lo_v))
    u, v = (p_hi, p_lo) if m.dirn < 0 else (p_lo, p_hi)
    if not u < v:
        return Approx(Fraction(0))
    total = Approx(Fraction(0))
    for x1, x2, ce, infinite in G.compose_pieces(m.e, u, v):
        if not x1 < x2:
            continue
        if infinite:
            return Approx(INF)
        val = ce.integrate(x1, x2) if ce is not None else None
        if val is None:
            total = total + _quad_band(G, m.e, x1, x2)
        elif is_inf(val):
            return Approx(INF)
        else:
            total = total + Approx(val, 0.0 if is_exact(val) else 1e-14 * abs(float(val)) + 1e-300)
        if is_inf(total.value):
            return total
    return total


def _quad_band(G, e: Expr, x1, x2) -> Approx:
    h = lambda t: float(G(e(t)))
    a, b = float(x1), float(x2)
    if math.isinf(b):
        t1 = max(a, 1.0) * 1e8
        h1, h2 = h(t1), h(t1 * 1e4)
        if h2 > 0 and (h1 <= 0 or math.log(h2 / h1) / math.log(1e4) > -1 - 1e-3):
            return Approx(INF)
    if a == 0:
        h1, h2 = h(1e-10 * b if b < INF else 1e-10), h(1e-14 * b if b < INF else 1e-14)
        if h2 > 0 and h1 > 0 and math.log(h2 / h1) / math.log(1e-4) < -1 + 1e-3:
            return Approx(INF)
    val, err = spi.quad(h, a, b, limit=500, epsabs=1e-15, epsrel=1e-13)
    return Approx(val, max(err, 1e-15 * abs(val)))


def _materialize(per: PeriodicTail, upto):
    """Explicit pieces of a periodic tail up to ``upto`` plus the remaining tail."""
    if is_inf(upto) or upto <= per.start:
        return [], per
    k = math.ceil((upto - per.start) / per.period)
    if k * len(per.pattern) > MAX_MATERIALIZE:
        raise NotInClass("periodic tail too long to materialize")
    out = []
    for j in range(k):
        base = per.start + j * per.period
        for a, b, v in per.pattern:
            out.append(Piece.const(base + a, base + b, v))
    return out, PeriodicTail(per.start + k * per.period, per.period, per.pattern)


def _merge_pieces(pieces):
    ps = sorted(pieces, key=lambda p: float(p.lo))
    out = []
    for p in ps:
        if out and out[-1].hi == p.lo and out[-1].expr == p.expr:
            out[-1] = Piece(out[-1].lo, p.hi, p.expr)
        else:
            out.append(p)
    return out


def combine(f: PiecewiseFn, g: PiecewiseFn, op: str) -> PiecewiseFn:
    """Pointwise f+g, f−g or max(f, g)."""
    same_domain(f, g)
    pf, pg = f.periodic, g.periodic
    if pf is not None or pg is not None:
        if pf is not None and pg is not None:
            if (pf.start, pf.period) != (pg.start, pg.period):
                raise NotInClass("periodic tails with different layouts")
        end = max(f.support_end if pf is None else pf.start, g.support_end if pg is None else pg.start)
        if pf is not None and pg is None and is_inf(g.support_end) or pg is not None and pf is None and is_inf(f.support_end):
            raise NotInClass("periodic tail against an unbounded piece")
        fm, fp = _materialize(pf, end) if pf else ([], None)
        gm, gp = _materialize(pg, end) if pg else ([], None)
        if fp and gp and fp.start != gp.start:
            raise NotInClass("periodic tails misaligned")
        f2 = PiecewiseFn(f.domain, list(f.pieces) + fm)
        g2 = PiecewiseFn(g.domain, list(g.pieces) + gm)
        head = combine(f2, g2, op)
        tail = None
        if fp or gp:
            start = (fp or gp).start
            period = (fp or gp).period
            cuts = sorted({Fraction(0), period} | {x for t in (fp, gp) if t for a, b, _ in t.pattern for x in (a, b)})
            pattern = []
            for a, b in zip(cuts, cuts[1:]):
                va = _pat_at(fp, a, b)
                vb = _pat_at(gp, a, b)
                pattern.append((a, b, _op_const(va, vb, op)))
            tail = PeriodicTail(start, period, tuple(p for p in pattern if p[2] != 0))
        return PiecewiseFn(f.domain, head.pieces, tail)
    cuts = sorted({x for p in f.pieces + g.pieces for x in (p.lo, p.hi)}, key=float)
    out = []
    for a, b in zip(cuts, cuts[1:]):
        ea = _expr_on(f, a, b)
        eb = _expr_on(g, a, b)
        if op == "add":
            e = ea + eb
        elif op == "sub":
            e = ea - eb
        elif op == "max":
            e = _max_expr(ea, eb, a, b)
        else:
            raise ValueError(op)
        if not e.is_zero:
            out.append(Piece(a, b, e))
    return PiecewiseFn(f.domain, _merge_pieces(out))


def _pat_at(per, a, b):
    if per is None:
        return Fraction(0)
    for x, y, v in per.pattern:
        if x <= a and b <= y:
            return v
    return Fraction(0)


def _op_const(x, y, op):
    return {"add": lambda: x + y, "sub": lambda: x - y, "max": lambda: max(x, y)}[op]()


def _expr_on(f, a, b):
    for p in f.pieces:
        if p.lo <= a and b <= p.hi:
            return p.expr
    return Expr()


def _max_expr(ea: Expr, eb: Expr, a, b):
    if ea.is_zero and all(float(x) >= 0 for x in (eb.limit_at(a), _mid_val(eb, a, b))):
        return eb
    if eb.is_zero and all(float(x) >= 0 for x in (ea.limit_at(a), _mid_val(ea, a, b))):
        return ea
    diff = ea - eb
    if diff.is_zero:
        return ea
    if _roots(diff, a, b):
        raise NotInClass("max of crossing pieces")
    return ea if float(_mid_val(diff, a, b)) >= 0 else eb


def _mid_val(e, a, b):
    return e(_mid(a, b))


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------


class SeqFn(Profile):
    """x_1..x_N explicitly, then an analytic tail rule n ↦ tail(n) for n > N."""

    domain = Domain.NATURALS

    def __init__(self, head: Sequence = (), tail: Optional[Expr] = None, _decreasing=False):
        self.head = tuple(exactify(parse_scalar(v) if isinstance(v, str) else v) for v in head)
        self.tail = tail if tail is not None else Expr()
        self._is_dec = _decreasing
        for t in self.tail.terms:
            if (t.alpha != 0 or t.logk) and len(self.head) + 1 + t.shift <= 0:
                raise InvalidFunction("tail undefined at n = N+1")

    @staticmethod
    def zero_tail(head) -> "SeqFn":
        return SeqFn(head)

    @staticmethod
    def const_tail(head, v) -> "SeqFn":
        return SeqFn(head, Expr.const(v))

    @staticmethod
    def hyp_tail(head, a, b) -> "SeqFn":
        return SeqFn(head, Expr.hyp(a, b))

    def __repr__(self):
        return f"SeqFn(head={list(self.head)}, tail={self.tail})"

    def __eq__(self, other):
        return isinstance(other, SeqFn) and self.head == other.head and self.tail == other.tail

    def __hash__(self):
        return hash((self.head, self.tail))

    @property
    def N(self):
        return len(self.head)

    def __call__(self, n):
        n = int(n)
        if n < 1:
            raise IndexError("sequences start at n = 1")
        return self.head[n - 1] if n <= self.N else self.tail(Fraction(n))

    @property
    def is_step(self):
        return True

    @property
    def exact(self):
        return all(is_exact(v) for v in self.head) and self.tail.exact_capable

    def values(self, n):
        return [self(k) for k in range(1, n + 1)]

    def scale(self, c) -> "SeqFn":
        return SeqFn([v * c for v in self.head], self.tail.scale(c))

    # -- normal form --------------------------------------------------
    @cached_property
    def _normal(self):
        """(head values, tail Expr ≥ 0 monotone on n > N', direction) with |x| taken."""
        head = list(self.head)
        e = self.tail
        N = self.N
        if not e.is_const and not e.is_zero:
            start = N + 1
            cuts = _roots(e.derivative(), start, INF) + _roots(e, start, INF)
            if cuts:
                upto = math.ceil(max(cuts)) + 1
                if upto > MAX_MATERIALIZE:
                    raise NotInClass("tail is not monotone soon enough")
                if e.exact_capable and upto - N <= 20_000:
                    head += [e(Fraction(n)) for n in range(N + 1, upto + 1)]
                else:
                    head += e.array(np.arange(N + 1, upto + 1, dtype=float)).tolist()
                N = upto
        head = [abs(v) for v in head]
        sample = e(Fraction(N + 1))
        if float(sample) < 0 or (float(sample) == 0 and float(e.limit_inf() or 0) < 0):
            e = -e
        L = e.limit_inf()
        if e.is_const:
            dirn = 0
        else:
            d = float(e.derivative()(N + 1))
            dirn = -1 if d < 0 else 1
        return head, e, dirn, L

    def rearranged(self) -> "SeqFn":
        if self._is_dec:
            return self
        head, e, dirn, L = self._normal
        N = len(head)
        big = sorted((v for v in head if v > L), key=float, reverse=True)
        if dirn >= 0:
            return SeqFn(big, Expr.const(L), _decreasing=True)
        # merge the large head values into the decreasing tail
        if big and e(Fraction(N + 1)) > big[-1]:
            reach = e.solve(big[-1], N + 1, INF)
            if reach is None or is_inf(reach) or float(reach) - N > MAX_MERGE:
                raise NotInClass("rearrangement prefix too long")
        out = []
        j = N + 1
        i = 0
        while i < len(big):
            tj = e(Fraction(j))
            if big[i] >= tj:
                out.append(big[i])
                i += 1
            else:
                out.append(tj)
                j += 1
            if len(out) > MAX_MATERIALIZE:
                raise NotInClass("rearrangement prefix too long")
        # position len(out)+1 carries tail index j
        tail = e.substitute_shift(Fraction(j - (len(out) + 1)))
        return SeqFn(out, tail, _decreasing=True)

    # -- primitives on x* --------------------------------------------
    def _dec(self):
        return self.rearranged()

    def d(self, lam, strict=True):
        if not strict and lam <= 0:
            return INF
        if is_inf(lam):
            return Fraction(0)
        head, e, dirn, L = self._normal
        cnt = sum(1 for v in head if v > lam or (not strict and v >= lam))
        if dirn >= 0:
            if L > lam or (not strict and L >= lam and dirn == 0):
                return INF
            return Fraction(cnt)
        if L > lam or (not strict and L >= lam):
            return INF
        N = len(head)
        first = e(Fraction(N + 1))
        if first < lam or (strict and first == lam):
            return Fraction(cnt)
        x = e.solve(lam, N + 1, INF)
        n = max(N, int(math.floor(float(x))) + 1)
        while n > N and not _above(e(Fraction(n)), lam, strict):
            n -= 1
        while _above(e(Fraction(n + 1)), lam, strict):
            n += 1
        return Fraction(cnt + n - N)

    def star(self, s):
        k = int(math.floor(s)) + 1
        x = self._dec()
        return x(k)

    def star_inf(self):
        if self.tail.is_zero:
            return Fraction(0)
        return abs(self.tail.limit_inf())

    def ess_sup(self):
        x = self._dec()
        return x(1) if x.N or not x.tail.is_zero else Fraction(0)

    def levels(self):
        head, e, dirn, L = self._normal
        return tuple(sorted({Fraction(0), L, *head}, key=float))

    def band(self, G, a, b) -> Approx:
        head, e, dirn, L = self._normal
        total = Approx(Fraction(0))
        for v in head:
            if a < v < b:
                total = total + Approx(G(v))
        N = len(head)
        if dirn == 0:
            if a < L < b and G(L) > 0:
                return Approx(INF)
            return total
        n1, n2 = _index_range(e, dirn, N + 1, a, b)
        if n1 is None:
            return total
        return total + _tail_sum(G, e, n1, n2)

    def partial_sum(self, n) -> Approx:
        """Σ_{k ≤ n} x*_k."""
        x = self._dec()
        n = int(n)
        m = min(n, x.N)
        s = Approx(sum((Fraction(v) if is_exact(v) else v for v in x.head[:m]), Fraction(0)))
        if n > x.N:
            s = s + _tail_sum(Gauge.identity(), x.tail, x.N + 1, n)
        return s

    def window(self, a, b) -> "SeqFn":
        """Keep indices n < a and n > b."""
        return self._restrict(lambda n: n < a or n > b, b)

    def complement_window(self, a, b) -> "SeqFn":
        return self._restrict(lambda n: a <= n <= b, b)

    def _restrict(self, keep, b):
        if is_inf(b):
            upto = self.N
        else:
            upto = max(self.N, int(math.floor(b)))
        if upto > MAX_MATERIALIZE:
            raise NotInClass("window too far out")
        head = [self(n) if keep(n) else Fraction(0) for n in range(1, upto + 1)]
        tail = self.tail if keep(upto + 1) else Expr()
        return SeqFn(head, tail)

    def distribution(self) -> "DistributionCurve":
        return DistributionCurve(self)

    def as_step_function(self) -> PiecewiseFn:
        """Embed a finitely supported sequence as x_n on (n−1, n)."""
        if not self.tail.is_zero:
            raise NotInClass("only finitely supported sequences embed exactly")
        return PiecewiseFn.step(Domain.HALFLINE, [(n - 1, n, v) for n, v in enumerate(self.head, 1) if v != 0])


def _above(v, lam, strict):
    return v > lam or (not strict and v >= lam)


def _index_range(e: Expr, dirn, start, a, b):
    """Integers n ≥ start with a < e(n) < b for a monotone e."""
    def first_where(pred):
        # smallest n ≥ start with pred(e(n)), pred monotone along n
        if pred(e(Fraction(start))):
            return start
        lo, hi = start, start + 1
        while not pred(e(Fraction(hi))):
            lo, hi = hi, hi * 2
            if hi > 2 ** 62:
                return None
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pred(e(Fraction(mid))):
                hi = mid
            else:
                lo = mid
        return hi

    L = e.limit_inf()
    if dirn < 0:
        n1 = first_where(lambda v: v < b)
        if n1 is None:
            return None, None
        if L > a:
            return n1, INF
        stop = first_where(lambda v: v <= a)
        n2 = stop - 1 if stop is not None else INF
    else:
        n1 = first_where(lambda v: v > a)
        if n1 is None:
            return None, None
        if L < b:
            return n1, INF
        stop = first_where(lambda v: v >= b)
        n2 = stop - 1 if stop is not None else INF
    if not is_inf(n2) and n2 < n1:
        return None, None
    return n1, n2


def _tail_sum(G, e: Expr, n1, n2) -> Approx:
    pieces = list(G.compose_pieces(e, Fraction(n1), n2 if is_inf(n2) else Fraction(n2)))
    if len(pieces) == 1 and pieces[0][2] is not None and not pieces[0][3]:
        ce = pieces[0][2]
        lim = ce.limit_inf() if is_inf(n2) else 0
        if is_inf(n2) and lim != 0:
            return Approx(INF)
        return series_sum(ce, n1, n2)
    if any(p[3] for p in pieces):
        return Approx(INF)
    if is_inf(n2) and G(e.limit_inf()) > 0:
        return Approx(INF)
    h = lambda n: np.array([float(G(e(float(x)))) for x in np.atleast_1d(n)])
    return series_sum_fn(h, n1, n2)


# ---------------------------------------------------------------------------
# distribution curves and rearrangement
# ---------------------------------------------------------------------------


class DistributionCurve:
    """λ ↦ d_f(λ), right-continuous and non-increasing."""

    def __init__(self, prof):
        self.profile = prof
        self.domain = prof.domain

    def __call__(self, lam):
        return self.profile.d(lam)

    def step_table(self):
        """For step functions: [(λ_lo, λ_hi, value)] covering [0, ess sup)."""
        if not self.profile.is_step:
            raise NotInClass("distribution of a non-step function has no step table")
        lv = [L for L in self.profile.levels() if not is_inf(L)]
        out = []
        for a, b in zip(lv, lv[1:]):
            out.append((a, b, self.profile.d(a)))
        if lv:
            out.append((lv[-1], INF, self.profile.d(lv[-1])))
        return out


def distribution(f) -> DistributionCurve:
    return DistributionCurve(f)


def tail_head(f):
    """(f*(∞), f*(0⁺))."""
    return f.star_inf(), f.ess_sup()


def rearrange_step(f: PiecewiseFn) -> PiecewiseFn:
    """Exact f* of a step function: sort the blocks by height."""
    blocks: dict = {}
    for m in f._mono:
        blocks[m.vlo] = blocks.get(m.vlo, Fraction(0)) + m.length
    for v in f._pattern:
        blocks[v] = INF
    out = []
    s = Fraction(0)
    for v in sorted(blocks, key=float, reverse=True):
        if v == 0:
            continue
        L = blocks[v]
        out.append(Piece.const(s, s + L, v))
        s = s + L
        if is_inf(s):
            break
    return PiecewiseFn(f.domain, out)


def is_nonincreasing_from_zero(f: PiecewiseFn) -> bool:
    if f.periodic is not None:
        return False
    mono = f._mono
    if not mono or mono[0].lo != 0:
        return not mono
    prev_hi = Fraction(0)
    prev_val = INF
    for m in mono:
        if m.lo != prev_hi or m.dirn > 0 or m.vlo > prev_val:
            return False
        prev_hi, prev_val = m.hi, m.vhi
    return True
