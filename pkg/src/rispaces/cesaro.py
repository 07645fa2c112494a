"""Continuous and discrete Cesàro (Hardy) operators."""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainMismatch, NotInClass, NotLocallyIntegrable
from .expr import Expr, Term
from .measurable import Domain, Piece, PiecewiseFn, SeqFn
from .scalars import INF, Approx, is_exact, is_inf

EULER_GAMMA = 0.57721566490153286061
# below this many terms the harmonic prefix is summed exactly
_EXACT_PREFIX = 5000
_MIN_HEAD = 64


def cesaro_apply(f):
    """C(|f|)(x) = (1/x)∫_0^x |f|, or the discrete prefix averages for sequences."""
    if isinstance(f, SeqFn):
        return _cesaro_seq(f)
    if not isinstance(f, PiecewiseFn):
        raise NotInClass("the Cesàro operator needs an explicit PiecewiseFn or SeqFn")
    if f.periodic is not None:
        raise NotInClass("periodic tails are outside the Cesàro closed form")
    g = f.abs()
    out = []
    A = Fraction(0)
    pos = Fraction(0)
    for p in g.pieces:
        if any(t.shift != 0 for t in p.expr.terms if not (t.alpha == 0 and t.logk == 0)):
            raise NotInClass("shifted pieces are outside the Cesàro closed form")
        if p.lo > pos:
            out.append(Piece(pos, p.lo, _avg(A)))
        E = p.expr.antiderivative()
        E0 = E.limit_at(p.lo)
        if E0 is None or is_inf(E0):
            raise NotLocallyIntegrable(f"|f| is not integrable near {p.lo}")
        # C(x) = (A − E(lo))/x + E(x)/x on this piece
        body = E.divide_by_t() + Expr.make([Term(A - E0, Fraction(-1))])
        out.append(Piece(p.lo, p.hi, body))
        if is_inf(p.hi):
            pos = INF
            break
        seg = p.expr.integrate(p.lo, p.hi)
        if seg is None or is_inf(seg):
            raise NotLocallyIntegrable(f"|f| is not integrable on ({p.lo}, {p.hi})")
        A = A + seg
        pos = p.hi
    end = f.domain.measure
    if pos < end and A != 0:
        out.append(Piece(pos, end, _avg(A)))
    return PiecewiseFn(f.domain, out)


def _avg(A) -> Expr:
    return Expr.make([Term(A, Fraction(-1))])


def _harmonic(n: int):
    if n <= _EXACT_PREFIX:
        return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))
    return math.fsum(1.0 / k for k in range(1, n + 1))


def _cesaro_seq(x: SeqFn) -> SeqFn:
    head, e, dirn, L = x._normal
    kind, params = e.kind() if not e.is_zero else ("const", [Fraction(0)])
    if kind == "const":
        a, b = Fraction(0), params[0]
    elif kind == "hyp":
        a, b = params
    else:
        raise NotInClass("discrete Cesàro tail needs a Zero, Const or Hyperbolic rule")
    M = max(len(head), _MIN_HEAD)
    vals = list(head) + [e(Fraction(n)) for n in range(len(head) + 1, M + 1)]
    avg = []
    s = Fraction(0)
    for n, v in enumerate(vals, 1):
        s = s + v
        avg.append(s / n if is_exact(s) else float(s) / n)
    # for n > M: S(n) = S_M + b(n − M) + a(H_n − H_M)
    c = s - b * M
    terms = [Term(b)]
    if a != 0:
        c = c - a * _harmonic(M)
        g = float(a)
        # H_n = ln n + γ + 1/(2n) − 1/(12n²) + 1/(120n⁴) + O(n⁻⁶)
        terms += [Term(g, -1, 0, 1), Term(g * EULER_GAMMA, -1), Term(g / 2, -2),
                  Term(-g / 12, -3), Term(g / 120, -5)]
    terms.append(Term(c, -1))
    return SeqFn(avg, Expr.make(terms))


def c_at_zero(f):
    """lim_{x→0⁺} C(|f|)(x)."""
    if isinstance(f, SeqFn):
        raise DomainMismatch("C(f)(0⁺) is defined for functions, not sequences")
    if f.periodic is not None and not f.pieces:
        return Fraction(0)
    ps = [p for p in f.abs().pieces if not p.expr.is_zero]
    if not ps or ps[0].lo > 0:
        return Fraction(0)
    v = ps[0].expr.limit_at(Fraction(0))
    if v is None:
        from .errors import NoLimit

        raise NoLimit("C(f) has no limit at 0⁺")
    return v


def cx_norm(f, base, tol=1e-12):
    """‖f‖_{CX} = ‖C(|f|)‖_X."""
    from .spaces import norm

    if f.domain != base.domain:
        raise DomainMismatch(f"function on {f.domain.value}, space on {base.domain.value}")
    return norm(cesaro_apply(f), base, tol)


def bound_probe(base, family, tol=1e-12) -> Approx:
    """max ‖C f‖/‖f‖ over the family: a lower bound for ‖C‖_{X→X}, never a proof."""
    from .spaces import norm

    best = Approx(Fraction(0))
    for f in family:
        n = norm(f, base, tol)
        if n.value == 0 or is_inf(n.value):
            continue
        c = cx_norm(f, base, tol)
        if is_inf(c.value):
            return Approx(INF)
        r = Approx(c.value, c.err_bound) / Approx(n.value, n.err_bound)
        if r.value > best.value:
            best = r
    return best
