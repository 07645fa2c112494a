"""Distance to the order-continuous ideal and the ℓ∞-copy checks built on it."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cesaro import bound_probe, c_at_zero, cesaro_apply, cx_norm
from .errors import InfiniteModular, NoConvergence, NotInClass, NotTrivialIdeal, UnsupportedForm
from .expr import Expr
from .generators import OrliczFn, QuasiConcaveFn
from .measurable import Domain, PeriodicTail, Piece, PiecewiseFn, SeqFn, combine
from .profiles import Composed, Rearranged, rearrange
from .scalars import INF, Approx, is_exact, is_inf, mul0, to_json_scalar
from .spaces import (ALL, TRIVIAL, Cesaro, EvalResult, Intersection, Linf, Lp, SpaceSpec, SumLpLinf,
                     embed_norm_to_Linf, linf_embeds, norm, oc_ideal_class, satisfies_d_infinity)

DEFAULT_TOL = 1e-6
MAX_DOUBLINGS = 40


@dataclass
class DistResult:
    value: object
    path: str  # limit-formula | deJonge-closed-form | trivial-ideal | oc-space
    schedule: list = field(default_factory=list)  # [(n, s_n)]
    err_bound: float = 0.0

    def to_dict(self):
        return {"value": to_json_scalar(self.value), "path": self.path, "err_bound": self.err_bound,
                "schedule": [[n, to_json_scalar(s)] for n, s in self.schedule]}


@dataclass
class Clause:
    description: str
    value: object
    target: object
    tol: float
    passed: bool
    err_bound: float = 0.0

    def to_dict(self):
        return {"description": self.description, "value": to_json_scalar(self.value),
                "err_bound": self.err_bound, "target": to_json_scalar(self.target),
                "tol": self.tol, "pass": self.passed}


@dataclass
class CheckReport:
    criterion: str
    clauses: list = field(default_factory=list)
    verdict: str = ""
    flags: list = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.clauses)

    def add(self, description, value, target, tol, passed=None, err_bound=0.0):
        if passed is None:
            passed = _close(value, target, tol)
        self.clauses.append(Clause(description, value, target, tol, bool(passed), float(err_bound)))
        return self.clauses[-1]

    def to_dict(self):
        return {"criterion": self.criterion, "overall": self.overall,
                "verdict": self.verdict if self.overall else "", "flags": list(self.flags),
                "clauses": [c.to_dict() for c in self.clauses]}


def _close(v, target, tol):
    if is_inf(v) or is_inf(target):
        return v == target
    return abs(float(v) - float(target)) <= tol


def _val(r):
    return r.value if isinstance(r, (EvalResult, DistResult)) else r


# ---------------------------------------------------------------------------
# distance to X_a
# ---------------------------------------------------------------------------


def _tail_window(prof, n):
    """f*·χ_{Ω_n} with Ω_n = (0, 1/n) ∪ (n, ∞), or the indices beyond n for sequences."""
    if prof.domain is Domain.NATURALS:
        # x*_{n+1}, x*_{n+2}, … is equimeasurable with the windowed sequence
        return SeqFn(prof.head[n:], prof.tail.substitute_shift(n), _decreasing=True)
    return prof.window(Fraction(1, n), Fraction(n))


def _bounded_flat_tail(fs) -> bool:
    """f bounded with f* ≡ f*(∞) beyond a finite point (so the limit has a closed form)."""
    if fs.domain is Domain.NATURALS:
        return False
    if is_inf(fs.ess_sup()):
        return False
    return not is_inf(fs.d(fs.star_inf()))


def dist_oc(f, X: SpaceSpec, tol=DEFAULT_TOL, samples=3) -> DistResult:
    """dist(f, X_a) = ‖f + X_a‖ in X/X_a."""
    if f.domain != X.domain:
        from .errors import DomainMismatch

        raise DomainMismatch(f"function on {f.domain.value}, space on {X.domain.value}")
    cls = oc_ideal_class(X)
    if cls == TRIVIAL:
        r = norm(f, X, tol * 1e-3)
        return DistResult(r.value, "trivial-ideal", [], r.err_bound)
    if cls == ALL:
        return DistResult(Fraction(0), "oc-space", [], 0.0)
    base = f.abs() if isinstance(f, PiecewiseFn) else f
    if not isinstance(X, Cesaro):
        closed = None
        if satisfies_d_infinity(X) and linf_embeds(X):
            closed, path = mul0(base.star_inf(), X.phi_limits()[1]), "deJonge-closed-form"
        elif _bounded_flat_tail(base):
            closed, path = mul0(base.star_inf(), X.phi_limits()[1]), "limit-formula"
        if closed is not None:
            sched = []
            try:
                fs = rearrange(base)
                sched = [(2 ** k, norm(_tail_window(fs, 2 ** k), X, tol * 1e-3).value) for k in range(samples)]
            except NotInClass:
                pass  # the cross-check samples need an explicit f*; the closed form does not
            return DistResult(closed, path, sched, 0.0)
    # CX is not rearrangement invariant, so its windows are taken on f itself
    fs = f if isinstance(X, Cesaro) else rearrange(base)
    s = lambda n: norm(_tail_window(fs, n), X, tol * 1e-3)
    sched = []
    agree = 0
    prev = None
    for k in range(MAX_DOUBLINGS + 1):
        n = 2 ** k
        r = s(n)
        sched.append((n, r.value))
        if prev is not None:
            if is_inf(r.value) and is_inf(prev.value):
                agree += 1
            elif not is_inf(r.value) and not is_inf(prev.value) and \
                    abs(float(prev.value) - float(r.value)) <= tol * max(1.0, float(r.value)):
                agree += 1
            else:
                agree = 0
        if agree >= 2:
            if is_inf(r.value):
                return DistResult(INF, "limit-formula", sched, 0.0)
            spread = abs(float(sched[-3][1]) - float(r.value))
            return DistResult(r.value, "limit-formula", sched, spread + r.err_bound)
        prev = r
    raise NoConvergence(f"limit schedule did not stabilise by n = 2^{MAX_DOUBLINGS}", sched)


def is_order_continuous(f, X, tol=DEFAULT_TOL) -> bool:
    r = dist_oc(f, X, tol)
    return not is_inf(r.value) and float(r.value) <= tol


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def hudzik_check(f, X, tol=DEFAULT_TOL) -> CheckReport:
    """‖f‖_X = dist(f, X_a) = 1 witnesses a lattice isometric copy of ℓ∞."""
    rep = CheckReport("hudzik", verdict="numerically consistent with a lattice isometric copy of l_inf in X")
    cls = oc_ideal_class(X)
    rep.flags.append("assumed: supp(X_a) = supp(X)")
    if cls == TRIVIAL and not isinstance(X, Cesaro):
        rep.flags.append("warning: X_a is trivial, so dist(f, X_a) is just the norm")
    n = norm(f, X, tol * 1e-3)
    rep.add("||f||_X = 1", n.value, 1, tol, err_bound=n.err_bound)
    d = dist_oc(f, X, tol)
    rep.add("dist(f, X_a) = 1", d.value, 1, tol, err_bound=d.err_bound)
    return rep


def _bound_rule(X) -> Optional[bool]:
    """Known boundedness of C on X, or None when the table has no entry."""
    if isinstance(X, Linf):
        return True
    if isinstance(X, (Lp, SumLpLinf)):
        return X.p > 1
    if isinstance(X, Intersection):
        a, b = _bound_rule(X.left), _bound_rule(X.right)
        return None if a is None or b is None else a and b
    return None


def cesaro_copy_check(f, a, b, X, tol=DEFAULT_TOL, require_bound_rule=False) -> CheckReport:
    """‖f‖_X = dist(f, X_a) = 1 and ‖f*χ_{(0,a)∪(b,∞)}‖_CX = 1 give an ℓ∞-copy in CX."""
    rep = CheckReport("thm41", verdict="numerically consistent with a lattice isometric copy of l_inf in CX")
    cls = oc_ideal_class(X)
    rep.add("precondition: X_a non-trivial and not all of X", cls, "nontrivial", 0,
            passed=(cls == "nontrivial"))
    if cls != "nontrivial":
        return rep
    rule = _bound_rule(X)
    dom = X.domain
    if dom is Domain.NATURALS:
        fam = [SeqFn([1]), SeqFn([1] * 10)]
    else:
        fam = [PiecewiseFn.indicator(dom, 0, Fraction(1, 2)), PiecewiseFn.indicator(dom, 0, Fraction(1, 10))]
    probe = bound_probe(X, fam)
    rep.flags.append(f"advisory: ||C||_X >= {float(probe.value):.6g} on a probe family")
    if rule is None:
        rep.flags.append("advisory: boundedness of C on X is not in the rule table")
        if require_bound_rule:
            rep.add("C bounded on X (rule table)", "unknown", True, 0, passed=False)
    else:
        rep.flags.append(f"rule table: C {'is' if rule else 'is not'} bounded on X")
        if require_bound_rule or not rule:
            rep.add("C bounded on X (rule table)", rule, True, 0, passed=rule)
    h = hudzik_check(f, X, tol)
    rep.clauses.extend(h.clauses)
    rep.flags.extend(x for x in h.flags if x not in rep.flags)
    fs = rearrange(f)
    g = fs.window(a, b) if not isinstance(fs, Rearranged) else None
    if g is None:
        raise NotInClass("the Cesàro image needs an explicit rearrangement; pass a step or monotone f")
    c = cx_norm(g, X, tol * 1e-3)
    rep.add(f"||f* chi_(0,{a})u({b},inf)||_CX = 1", c.value, 1, tol, err_bound=c.err_bound)
    return rep


def trivial_ideal_copy_check(f, X, tol=DEFAULT_TOL) -> CheckReport:
    """C(f)(0⁺) = 1 and ‖f‖_CX = ‖id: X → L∞‖ when X_a = {0}."""
    if oc_ideal_class(X) != TRIVIAL:
        raise NotTrivialIdeal("this criterion needs X_a = {0}")
    rep = CheckReport("thm46", verdict="numerically consistent with a lattice isometric copy of l_inf in CX")
    c0 = c_at_zero(f)
    rep.add("C(f)(0+) = 1", c0, 1, tol)
    cx = cx_norm(f, X, tol * 1e-3)
    e = embed_norm_to_Linf(X)
    rep.add("||f||_CX = ||id: X -> L_inf||", cx.value, e.value, tol, err_bound=cx.err_bound)
    return rep


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


@dataclass
class WitnessFamily:
    members: list
    tag: str  # disjoint-blocks | marcinkiewicz | flat-lorentz
    disjoint: bool = True

    def total(self):
        out = self.members[0]
        for m in self.members[1:]:
            out = combine(out, m, "add")
        return out


def _flat_value(f):
    if not isinstance(f, PiecewiseFn) or f.periodic is not None or len(f.pieces) != 1:
        raise UnsupportedForm("disjoint blocks need f = c·χ_(0,∞)")
    p = f.pieces[0]
    if p.lo != 0 or not is_inf(p.hi) or not p.expr.is_const or f.domain is not Domain.HALFLINE:
        raise UnsupportedForm("disjoint blocks need f = c·χ_(0,∞)")
    return p.expr.const_value()


def _blocks(c, k):
    # member i lives on the blocks (j−1, j) with j ≡ i (mod k)
    return [PiecewiseFn(Domain.HALFLINE, [], PeriodicTail(Fraction(0), Fraction(k),
                                                          ((Fraction(i), Fraction(i + 1), c),)))
            for i in range(k)]


def build_witness(kind: str, *, f=None, k=4, phi: Optional[QuasiConcaveFn] = None, a=1) -> WitnessFamily:
    if kind == "disjoint-blocks":
        c = _flat_value(f)
        if k < 1:
            raise UnsupportedForm("k must be positive")
        return WitnessFamily(_blocks(c, k), kind)
    if kind == "flat-lorentz":
        if phi is None or is_inf(phi.phiInf):
            raise UnsupportedForm("flat-lorentz needs φ(∞) < ∞")
        c = 1 / phi.phiInf if is_exact(phi.phiInf) else 1.0 / float(phi.phiInf)
        if k == 1:
            return WitnessFamily([PiecewiseFn.step(Domain.HALFLINE, [(0, INF, c)])], kind)
        return WitnessFamily(_blocks(c, k), kind)
    if kind == "marcinkiewicz":
        if phi is None or len(phi.pieces) != 1:
            raise UnsupportedForm("marcinkiewicz witness needs φ = c·t^θ")
        kd, params = phi.pieces[0].expr.kind()
        if kd != "pow" or not 0 < params[1] < 1:
            raise UnsupportedForm("marcinkiewicz witness needs φ = c·t^θ with 0 < θ < 1")
        cst, th = params
        dom = Domain.UNIT if phi.end == 1 else Domain.HALFLINE
        # ψ = t/φ(t), g = ψ′ χ_(0, ε) for shrinking ε
        members = [PiecewiseFn(dom, [Piece.pow(0, Fraction(a) / 2 ** i, (1 - th) / cst, -th)]) for i in range(k)]
        return WitnessFamily(members, kind, disjoint=False)
    raise UnsupportedForm(f"unknown witness construction {kind!r}")


def _support_intervals(m: PiecewiseFn, upto):
    out = [(p.lo, p.hi) for p in m.pieces if not p.expr.is_zero]
    per = m.periodic
    if per is not None:
        base = per.start
        while base < upto:
            out += [(base + x, base + y) for x, y, v in per.pattern if v != 0]
            base = base + per.period
    return out


def verify_witness(W: WitnessFamily, X: SpaceSpec, tol=DEFAULT_TOL, truncations=()) -> CheckReport:
    """Finite-k content of an isometric ℓ∞-copy: disjointness, unit members and unit partial sums."""
    rep = CheckReport(f"witness:{W.tag}", verdict="numerically consistent with a lattice isometric copy of l_inf")
    if W.disjoint:
        k = len(W.members)
        horizon = max([Fraction(4 * k)] + [p.hi for m in W.members for p in m.pieces if not is_inf(p.hi)])
        ivs = [_support_intervals(m, horizon) for m in W.members]
        ok = True
        for i, j in itertools.combinations(range(k), 2):
            for x1, y1 in ivs[i]:
                for x2, y2 in ivs[j]:
                    if max(x1, x2) < min(y1, y2):
                        ok = False
        rep.add("supports pairwise disjoint", ok, True, 0, passed=ok)
    else:
        rep.flags.append("members are nested truncations, not disjoint")
    for i, m in enumerate(W.members):
        r = norm(m, X, tol * 1e-3)
        rep.add(f"||member {i + 1}|| = 1", r.value, 1, tol, err_bound=r.err_bound)
    if W.disjoint and len(W.members) > 1:
        for size in range(2, len(W.members) + 1):
            for idx in itertools.combinations(range(len(W.members)), size):
                s = W.members[idx[0]]
                for j in idx[1:]:
                    s = combine(s, W.members[j], "add")
                r = norm(s, X, tol * 1e-3)
                rep.add(f"||sum of members {[j + 1 for j in idx]}|| = 1", r.value, 1, tol, err_bound=r.err_bound)
    total = W.total() if W.disjoint else W.members[0]
    for m in truncations:
        fs = rearrange(total)
        g = fs.complement_window(Fraction(1, m), Fraction(m))
        r = norm(combine(total, g, "sub"), X, tol * 1e-3)
        rep.add(f"||sum - f* chi_(1/{m},{m})|| >= 1", r.value, 1, tol,
                passed=is_inf(r.value) or float(r.value) >= 1 - tol, err_bound=r.err_bound)
    return rep


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------


def pointwise_max(f, g):
    if isinstance(f, PiecewiseFn) and isinstance(g, PiecewiseFn):
        return combine(f.abs(), g.abs(), "max")
    if isinstance(f, SeqFn) and isinstance(g, SeqFn):
        ef, eg = f.tail, g.tail
        if not ((ef.is_const or ef.is_zero) and (eg.is_const or eg.is_zero)):
            raise NotInClass("sequence max needs Zero or Const tails")
        N = max(f.N, g.N)
        head = [max(abs(f(n)), abs(g(n))) for n in range(1, N + 1)]
        return SeqFn(head, Expr.const(max(abs(ef.const_value()), abs(eg.const_value()))))
    raise NotInClass("max of these inputs is not representable")


def am_property_probe(f, g, X, tol=DEFAULT_TOL) -> CheckReport:
    """dist(f ∨ g, X_a) = max{dist(f, X_a), dist(g, X_a)} on one pair (a probe, not a verdict)."""
    rep = CheckReport("am", verdict="this pair is consistent with X/X_a being an AM-space")
    rep.flags.append("probe on a single pair only")
    df, dg = dist_oc(f, X, tol), dist_oc(g, X, tol)
    dm = dist_oc(pointwise_max(f, g), X, tol)
    mx = df.value if df.value >= dg.value else dg.value
    rep.add("dist(f v g) = max(dist f, dist g)", dm.value, mx, tol, err_bound=dm.err_bound)
    return rep


def modular_domination_check(F: OrliczFn, baseX: SpaceSpec, f, M, tol=DEFAULT_TOL) -> CheckReport:
    """‖F(C|f|)‖_X ≤ M‖F(|f|)‖_X on one instance."""
    rep = CheckReport("modular", verdict="inequality holds for this instance")
    rep.flags.append("single instance, not a proof of the modular inequality")
    G = F.gauge()
    rhs_n = norm(Composed(f, G), baseX)
    if is_inf(rhs_n.value):
        raise InfiniteModular("F(|f|) has infinite norm: f is outside the Calderón–Lozanovskiĭ class")
    lhs = norm(Composed(cesaro_apply(f), G), baseX)
    rhs = mul0(M, rhs_n.value) if is_exact(M) and is_exact(rhs_n.value) else float(M) * float(rhs_n.value)
    if is_inf(lhs.value):
        rep.flags.append("F(C|f|) has infinite norm")
        rep.add("||F(C|f|)|| <= M ||F(|f|)||", INF, rhs, tol, passed=False)
        return rep
    ok = float(lhs.value) <= float(rhs) + tol
    rep.add("||F(C|f|)|| <= M ||F(|f|)||", lhs.value, rhs, tol, passed=ok, err_bound=lhs.err_bound)
    return rep


def discrete_oc_dist(x: SeqFn, baseX: SpaceSpec, tol=DEFAULT_TOL) -> DistResult:
    """dist(C_d|x|, X_a), which decides x ∈ (CX)_a."""
    return dist_oc(cesaro_apply(x), baseX, tol)


def discrete_oc_membership(x: SeqFn, baseX: SpaceSpec, tol=DEFAULT_TOL) -> bool:
    """x ∈ (CX)_a ⇔ C_d|x| ∈ X_a."""
    cx = cesaro_apply(x)
    if oc_ideal_class(baseX) == ALL:
        return not is_inf(norm(cx, baseX).value)
    return is_order_continuous(cx, baseX, tol)
