"""The bundled reproduction suite: one row per checked statement.

``tol`` is the *algorithm* tolerance handed to the engines (bisection width,
limit-schedule stabilisation).  The comparison tolerances of the rows are
pinned, so loosening ``tol`` makes rows fail instead of silently passing.
"""

from __future__ import annotations

import fnmatch
import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .cesaro import cesaro_apply, cx_norm
from .expr import Expr
from .generators import OrliczFn, QuasiConcaveFn
from .ideal import (build_witness, cesaro_copy_check, discrete_oc_dist, discrete_oc_membership, dist_oc,
                    hudzik_check, trivial_ideal_copy_check, verify_witness)
from .measurable import Domain, Piece, PiecewiseFn, SeqFn, combine
from .profiles import rearrange
from .scalars import INF, is_inf, to_json_scalar
from .spaces import (CalderonLozanovskii, Intersection, Linf, Lp, Marcinkiewicz, SumLpLinf, norm)

DEFAULT_SEED = 20240229
DEFAULT_TOL = 1e-12

H, U, N = Domain.HALFLINE, Domain.UNIT, Domain.NATURALS


@dataclass
class Row:
    statement_id: str
    input_digest: str
    value: object
    err_bound: float
    target: object
    tol: float
    passed: bool

    def to_dict(self):
        return {"statement_id": self.statement_id, "input_digest": self.input_digest,
                "value": to_json_scalar(self.value), "err_bound": self.err_bound,
                "target": to_json_scalar(self.target), "tol": self.tol, "pass": self.passed}


def digest(*parts) -> str:
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:12]


def _row(sid, inputs, value, target, tol, err=0.0, passed=None):
    if passed is None:
        if is_inf(value) or is_inf(target):
            passed = value == target
        else:
            passed = abs(float(value) - float(target)) <= tol
    return Row(sid, digest(sid, inputs), value, float(err), target, tol, bool(passed))


# ---------------------------------------------------------------------------
# seeded inputs
# ---------------------------------------------------------------------------


def random_step(rng: random.Random, domain=H, max_pieces=12, signed=True, flat_tail=None) -> PiecewiseFn:
    """Random step function with rational breakpoints (gaps allowed)."""
    n = rng.randint(1, max_pieces)
    if domain is U:
        cuts = sorted({Fraction(rng.randint(1, 239), 240) for _ in range(2 * n)})
        pts = [Fraction(0)] + cuts + [Fraction(1)]
        blocks = []
        for a, b in zip(pts, pts[1:]):
            if rng.random() < 0.8:
                blocks.append((a, b, _rand_val(rng, signed)))
        return PiecewiseFn.step(U, blocks[:max_pieces] or [(0, 1, 1)])
    blocks = []
    x = Fraction(0)
    for _ in range(n):
        a = x + Fraction(rng.randint(0, 4), rng.randint(1, 4))
        b = a + Fraction(rng.randint(1, 8), rng.randint(1, 4))
        blocks.append((a, b, _rand_val(rng, signed)))
        x = b
    if flat_tail if flat_tail is not None else rng.random() < 0.5:
        blocks[-1] = (blocks[-1][0], INF, abs(blocks[-1][2]) or Fraction(1))
    return PiecewiseFn.step(H, blocks)


def _rand_val(rng, signed):
    v = Fraction(rng.randint(1, 9), rng.randint(1, 4))
    return -v if signed and rng.random() < 0.3 else v


def random_seq(rng: random.Random, tails=("zero", "const", "hyp")) -> SeqFn:
    head = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(rng.randint(1, 12))]
    kind = rng.choice(tails)
    if kind == "zero":
        return SeqFn(head)
    if kind == "const":
        return SeqFn(head, Expr.const(Fraction(rng.randint(0, 4), rng.randint(1, 3))))
    return SeqFn(head, Expr.hyp(Fraction(rng.randint(1, 5)), Fraction(rng.randint(0, 3), rng.randint(1, 3))))


def sort_oracle(f):
    """Decreasing rearrangement of a step function by sorting blocks by height."""
    if isinstance(f, SeqFn):
        return sorted((abs(v) for v in f.head if v != 0), reverse=True)
    mass = {}
    for p in f.pieces:
        v = abs(p.expr.const_value())
        if v:
            mass[v] = mass.get(v, Fraction(0)) + (p.hi - p.lo)
    out, s = [], Fraction(0)
    for v in sorted(mass, reverse=True):
        out.append((s, s + mass[v], v))
        s = s + mass[v]
    return out


def _blocks(f: PiecewiseFn):
    return [(p.lo, p.hi, p.expr.const_value()) for p in f.pieces]


def phi_sqrt():
    return QuasiConcaveFn.power(Fraction(1, 2))


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def rows_rearrangement(seed, tol, count=200):
    rows = []
    for dom in (U, H, N):
        rng = random.Random(f"{seed}:rearrange:{dom.value}")
        bad = 0
        for _ in range(count):
            if dom is N:
                x = random_seq(rng, tails=("zero",))
                ok = list(rearrange(x).head) == sort_oracle(x)
            else:
                f = random_step(rng, dom, flat_tail=False)
                ok = _blocks(rearrange(f)) == sort_oracle(f)
            bad += not ok
        rows.append(_row(f"rearrange:oracle:{dom.value}", (seed, count), bad, 0, 0))
    return rows


def _symmetry_spaces():
    return [("sum_lp_linf", SumLpLinf(2), H), ("marcinkiewicz_sqrt", Marcinkiewicz(phi_sqrt()), H),
            ("linf_naturals", Linf(N), N)]


def rows_symmetry(seed, tol, count=100):
    rows = []
    for name, X, dom in _symmetry_spaces():
        rng = random.Random(f"{seed}:symmetry:{name}")
        worst = 0.0
        for _ in range(count):
            f = random_seq(rng) if dom is N else random_step(rng, H)
            a = dist_oc(f, X, 1e-7, samples=1).value
            b = dist_oc(rearrange(f), X, 1e-7, samples=1).value
            worst = max(worst, _gap(a, b))
        rows.append(_row(f"thm3.5:symmetry:{name}", (seed, count), worst, 0, 1e-6))
    return rows


def _gap(a, b):
    if is_inf(a) or is_inf(b):
        return 0.0 if a == b else INF
    return abs(float(a) - float(b))


def rows_monotone_modulus(seed, tol, count=100):
    rng = random.Random(f"{seed}:monotone")
    X = SumLpLinf(2)
    worst_mono, worst_mod = 0.0, 0.0
    for _ in range(count):
        f = random_step(rng, H)
        # 0 ≤ g ≤ |f|: shrink each block by a random factor in [0, 1]
        g = PiecewiseFn.step(H, [(a, b, abs(v) * Fraction(rng.randint(0, 4), 4)) for a, b, v in _blocks(f)])
        df = dist_oc(f, X, 1e-7, samples=0).value
        dg = dist_oc(g, X, 1e-7, samples=0).value
        worst_mono = max(worst_mono, float(dg) - float(df))
        dabs = dist_oc(f.abs(), X, 1e-7, samples=0).value
        worst_mod = max(worst_mod, _gap(df, dabs))
    return [_row("cor3.2:monotone", (seed, count), max(worst_mono, 0.0), 0, 1e-6,
                 passed=worst_mono <= 1e-6),
            _row("lemma3.3:modulus", (seed, count), worst_mod, 0, 1e-6)]


def grid_restricted_min(f, X, ms=tuple(4 ** k for k in range(1, 13)), thetas=(Fraction(1, 2), Fraction(3, 4), 1)):
    """min of ‖f* − θ·f*χ_(1/m, m)‖ over a grid; every such g lies in X_a with |g| ≤ f*."""
    fs = rearrange(f)
    best = INF
    for m in ms:
        g = fs.complement_window(Fraction(1, m), Fraction(m))
        for th in thetas:
            h = fs.window(Fraction(1, m), Fraction(m))
            if th != 1:
                h = combine(h, g.scale(1 - Fraction(th)), "add")
            best = min(best, float(norm(h, X).value))
    return best


def limit_schedule(f, X, tol, kmax=40):
    """s_n = ‖f*χ_{(0,1/n)∪(n,∞)}‖ for n = 2^k; returns (samples, non-increasing?)."""
    fs = rearrange(f)
    out = [(2 ** k, float(norm(fs.window(Fraction(1, 2 ** k), Fraction(2 ** k)), X, tol).value))
           for k in range(0, kmax + 1, 4)]
    mono = all(b[1] <= a[1] + 1e-12 for a, b in zip(out, out[1:]))
    return out, mono


def rows_dejonge(seed, tol):
    X = SumLpLinf(2)
    f = PiecewiseFn.step(H, [(0, 1, 2), (1, INF, 1)])
    d = dist_oc(f, X, 1e-7)
    rows = [_row("cor3.7:dejonge:closed-form", "2chi(0,1)+chi(1,inf)", d.value, 1, 1e-9),
            _row("cor3.7:dejonge:path", "2chi(0,1)+chi(1,inf)", d.path, "deJonge-closed-form", 0,
                 passed=d.path == "deJonge-closed-form")]
    sched, mono = limit_schedule(f, X, tol)
    rows.append(_row("cor3.7:dejonge:limit-formula", "2chi(0,1)+chi(1,inf)", sched[-1][1], 1, 1e-6))
    rows.append(_row("thm3.4:limit-monotone", "2chi(0,1)+chi(1,inf)", mono, True, 0, passed=mono))
    rows.append(_row("lemma3.1:grid-minimisation", "2chi(0,1)+chi(1,inf)", grid_restricted_min(f, X), 1, 1e-3))
    return rows


def psi_prime(theta, a=1, domain=U):
    """ψ′ for ψ(t) = t/φ(t) with φ = t^θ, truncated to (0, a)."""
    theta = Fraction(theta)
    return PiecewiseFn(domain, [Piece.pow(0, a, 1 - theta, -theta)])


def rows_marcinkiewicz(seed, tol):
    rows = []
    for th in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        X = Marcinkiewicz(QuasiConcaveFn.power(th, end=1), U)
        g = psi_prime(th)
        r = norm(g, X, tol)
        rows.append(_row(f"cor3.8:norm:theta={th}", th, r.value, 1, 1e-9, r.err_bound))
        d = dist_oc(g, X, 1e-7)
        rows.append(_row(f"cor3.8:dist:theta={th}", th, d.value, 1, 1e-6, d.err_bound))
    return rows


def rows_cesaro_copy(seed, tol):
    X = SumLpLinf(2)
    chi = PiecewiseFn.indicator(H, 0, INF)
    rows = []
    h = hudzik_check(chi, X, 1e-6)
    rows.append(_row("prop4.4:hudzik", "chi(0,inf)", h.overall, True, 0, passed=h.overall))
    for b in (1, 10):
        v = cx_norm(chi.window(0, b), X, tol)
        rows.append(_row(f"prop4.4:cx-window:b={b}", ("chi(0,inf)", b), v.value, 1, 1e-6, v.err_bound))
        rep = cesaro_copy_check(chi, 0, b, X, 1e-6)
        rows.append(_row(f"thm4.1:copy-check:b={b}", ("chi(0,inf)", b), rep.overall, True, 0, passed=rep.overall))
    return rows


def rows_trivial_ideal(seed, tol):
    rows = []
    eps0 = Fraction(1, 2)
    for name, X in (("intersection", Intersection(SumLpLinf(2), Linf())), ("linf", Linf())):
        rep = trivial_ideal_copy_check(PiecewiseFn.indicator(H, 0, eps0), X, 1e-9)
        rows.append(_row(f"thm4.6:copy-check:{name}", eps0, rep.overall, True, 0, passed=rep.overall))
    v = cx_norm(PiecewiseFn.indicator(H, 0, 1), Linf())
    rows.append(_row("rem4.8a:ces_inf:chi(0,1)", "chi(0,1)", v.value, 1, 0,
                     passed=v.method == "exact" and v.value == 1))
    return rows


def rows_fp_inf(seed, tol, count=50):
    rows = []
    for p in (1, 2):
        rng = random.Random(f"{seed}:fpinf:{p}")
        X = CalderonLozanovskii(Lp(1), OrliczFn.F_p_inf(p))
        worst = 0.0
        for _ in range(count):
            f = random_step(rng, H, flat_tail=False)
            a = norm(f, X, tol).value
            b = max(float(norm(f, Lp(p)).value), float(norm(f, Linf()).value))
            worst = max(worst, abs(float(a) - b) / max(1.0, b))
        rows.append(_row(f"rem4.8b:F_p_inf:p={p}", (seed, count), worst, 0, 1e-9))
    return rows


def rows_luxemburg(seed, tol, count=50):
    rows = []
    for p in (Fraction(3, 2), Fraction(2), Fraction(3)):
        rng = random.Random(f"{seed}:luxemburg:{p}")
        X = CalderonLozanovskii(Lp(1), OrliczFn.power(p))
        worst = 0.0
        for _ in range(count):
            f = random_step(rng, H, flat_tail=False)
            a = float(norm(f, X, tol).value)
            b = float(norm(f, Lp(p)).value)
            worst = max(worst, abs(a - b) / max(1.0, b))
        rows.append(_row(f"luxemburg:x^p:p={p}", (seed, count), worst, 0, 1e-9))
    return rows


def tail_decay_oracle(x: SeqFn, base, n0=10_000) -> bool:
    """x ∈ (CX)_a judged from brute-force prefix averages of |x| on (n0, 2·n0]."""
    import numpy as np

    n = np.arange(1, 2 * n0 + 1, dtype=float)
    vals = np.abs(np.array([float(x(k)) for k in range(1, x.N + 1)] + list(x.tail.array(n[x.N:]) if not x.tail.is_zero
                                                                           else np.zeros(len(n) - x.N))))
    avg = np.cumsum(vals) / n
    window = avg[n0:]
    if isinstance(base, Linf):
        return float(window.max()) < 0.1
    return float(np.sum(window ** 2)) < 1.0


def rows_discrete(seed, tol, count=100):
    rows = []
    for name, X in (("linf", Linf(N)), ("l2", Lp(2, N))):
        rng = random.Random(f"{seed}:discrete:{name}")
        bad = 0
        for _ in range(count):
            x = random_seq(rng)
            bad += discrete_oc_membership(x, X, 1e-9) != tail_decay_oracle(x, X)
        rows.append(_row(f"appendix:discrete-oc:{name}", (seed, count), bad, 0, 0))
    e1 = SeqFn([1])
    rows.append(_row("appendix:discrete-oc:e1", "e1", discrete_oc_membership(e1, Linf(N)), True, 0,
                     passed=discrete_oc_membership(e1, Linf(N)) is True))
    ones = SeqFn([], Expr.const(1))
    mem = discrete_oc_membership(ones, Linf(N))
    rows.append(_row("appendix:discrete-oc:chi_N", "chi_N", mem, False, 0, passed=mem is False))
    d = discrete_oc_dist(ones, Linf(N))
    rows.append(_row("appendix:discrete-oc:chi_N:dist", "chi_N", d.value, 1, 1e-9))
    return rows


def rows_witness(seed, tol, k=6):
    X = SumLpLinf(2)
    chi = PiecewiseFn.indicator(H, 0, INF)
    W = build_witness("disjoint-blocks", f=chi, k=k)
    rep = verify_witness(W, X, 1e-6, truncations=(10, 100))
    rows = [_row(f"lemma3.10:witness:{c.description}", k, c.value, c.target, c.tol, c.err_bound, c.passed)
            for c in rep.clauses]
    rows.append(_row("lemma3.10:witness:partial-sum-count", k,
                     sum(1 for c in rep.clauses if c.description.startswith("||sum of")) + k,
                     2 ** k - 1, 0))
    return rows


def rows_examples(seed, tol):
    """Worked examples with closed-form answers."""
    rows = []
    g = PiecewiseFn(U, [Piece.pow(0, 1, Fraction(1, 2), Fraction(-1, 2))])
    M = Marcinkiewicz(QuasiConcaveFn.power(Fraction(1, 2), end=1), U)
    rows.append(_row("example:marcinkiewicz-norm", "psi'", norm(g, M).value, 1, 1e-9))
    rows.append(_row("example:hudzik:marcinkiewicz", "psi'", hudzik_check(g, M, 1e-6).overall, True, 0,
                     passed=hudzik_check(g, M, 1e-6).overall))
    X = CalderonLozanovskii(Lp(1), OrliczFn.F_inf())
    rows.append(_row("example:F_inf-is-linf", "3chi(0,5)", norm(PiecewiseFn.indicator(H, 0, 5, 3), X).value, 3, 0))
    rows.append(_row("example:ces_l2:e1", "e1", cx_norm(SeqFn([1]), Lp(2, N)).value, math.pi / math.sqrt(6), 1e-9))
    rows.append(_row("example:sum:chi", "chi(0,inf)", norm(PiecewiseFn.indicator(H, 0, INF), SumLpLinf(2)).value,
                     1, 1e-12))
    return rows


CRITERIA = [
    ("rearrange", rows_rearrangement),
    ("thm3.5", rows_symmetry),
    ("cor3.2", rows_monotone_modulus),
    ("cor3.7", rows_dejonge),
    ("cor3.8", rows_marcinkiewicz),
    ("prop4.4", rows_cesaro_copy),
    ("thm4.6", rows_trivial_ideal),
    ("rem4.8b", rows_fp_inf),
    ("luxemburg", rows_luxemburg),
    ("appendix", rows_discrete),
    ("lemma3.10", rows_witness),
    ("example", rows_examples),
]


def _matches(pattern, sid):
    if pattern is None:
        return True
    if any(ch in pattern for ch in "*?["):
        return fnmatch.fnmatchcase(sid, pattern)
    return pattern in sid


def run_paper_suite(filter=None, seed=DEFAULT_SEED, tol=DEFAULT_TOL):
    """Run every group whose id can match the filter; rows come back in a fixed order."""
    rows = []
    for prefix, fn in CRITERIA:
        if filter is not None and not any(ch in filter for ch in "*?[") and filter not in prefix \
                and prefix not in filter:
            continue
        for r in fn(seed, tol):
            if _matches(filter, r.statement_id):
                rows.append(r)
    return rows
