"""JSON literal formats for functions, generators, spaces and jobs."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ParseError, RispacesError
from .expr import Expr, Term
from .generators import OrliczFn, QuasiConcaveFn
from .measurable import Domain, PeriodicTail, Piece, PiecewiseFn, SeqFn
from .scalars import INF, is_inf, parse_scalar, to_json_scalar
from .spaces import (Cesaro, CalderonLozanovskii, Intersection, Linf, Lorentz, Lp, Marcinkiewicz, SpaceSpec,
                     SumLpLinf)


def scalar_out(x):
    return to_json_scalar(x)


class _Ctx:
    """Carries the source text so errors can point at a line and column."""

    def __init__(self, text: Optional[str]):
        self.text = text

    def fail(self, path, message):
        line, col = self.locate(path)
        raise ParseError(".".join(str(p) for p in path) or "<root>", line, col, message)

    def locate(self, path):
        if not self.text:
            return None, None
        pos = 0
        for key in path:
            if isinstance(key, int):
                continue
            m = re.compile(r'"%s"\s*:' % re.escape(str(key))).search(self.text, pos)
            if m is None:
                break
            pos = m.start()
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col


def _need(ctx, obj, key, path):
    if not isinstance(obj, dict):
        ctx.fail(path, "expected an object")
    if key not in obj:
        ctx.fail(path + [key], f'missing field "{key}"')
    return obj[key]


def _scalar(ctx, v, path):
    try:
        return parse_scalar(v)
    except ValueError as exc:
        ctx.fail(path, str(exc))


def _params(ctx, obj, path, n=None):
    ps = _need(ctx, obj, "params", path)
    if not isinstance(ps, list) or (n is not None and len(ps) != n):
        ctx.fail(path + ["params"], f"expected {n} parameters" if n else "expected a list")
    return ps


def _expr(ctx, obj, path) -> Expr:
    kind = _need(ctx, obj, "kind", path)
    if kind == "zero":
        return Expr()
    if kind == "const":
        (c,) = _params(ctx, obj, path, 1)
        return Expr.const(_scalar(ctx, c, path + ["params", 0]))
    if kind == "hyp":
        a, b = _params(ctx, obj, path, 2)
        return Expr.hyp(_scalar(ctx, a, path + ["params", 0]), _scalar(ctx, b, path + ["params", 1]))
    if kind == "pow":
        c, al = _params(ctx, obj, path, 2)
        return Expr.pow(_scalar(ctx, c, path + ["params", 0]), _scalar(ctx, al, path + ["params", 1]))
    if kind == "expr":
        terms = []
        for i, t in enumerate(_params(ctx, obj, path)):
            if not isinstance(t, list) or len(t) != 4:
                ctx.fail(path + ["params", i], "expected [coef, alpha, shift, logk]")
            sc = [_scalar(ctx, x, path + ["params", i]) for x in t[:3]]
            terms.append(Term(sc[0], sc[1], sc[2], int(t[3])))
        return Expr.make(terms)
    ctx.fail(path + ["kind"], f"unknown piece kind {kind!r}")


def expr_to_literal(e: Expr):
    if e.is_zero:
        return {"kind": "zero", "params": []}
    kind, params = e.kind()
    if kind == "expr":
        return {"kind": "expr", "params": [[scalar_out(c), scalar_out(a), scalar_out(s), k] for c, a, s, k in params]}
    return {"kind": kind, "params": [scalar_out(x) for x in params]}


def _pieces(ctx, obj, path):
    raw = obj.get("pieces", [])
    if not isinstance(raw, list):
        ctx.fail(path + ["pieces"], "expected a list")
    out = []
    for i, p in enumerate(raw):
        pp = path + ["pieces", i]
        lo = _scalar(ctx, _need(ctx, p, "lo", pp), pp + ["lo"])
        hi = _scalar(ctx, _need(ctx, p, "hi", pp), pp + ["hi"])
        out.append(Piece(lo, hi, _expr(ctx, p, pp)))
    return out


def pieces_to_literal(pieces):
    return [{"lo": scalar_out(p.lo), "hi": scalar_out(p.hi), **expr_to_literal(p.expr)} for p in pieces]


# ---------------------------------------------------------------------------
# functions
# ---------------------------------------------------------------------------


def function_from_obj(obj, ctx=None, path=None, domain=None):
    ctx = ctx or _Ctx(None)
    path = path or []
    try:
        dom = Domain.parse(obj.get("domain", domain.value if domain else None) if isinstance(obj, dict) else None)
    except ValueError as exc:
        ctx.fail(path + ["domain"], str(exc))
    try:
        if dom is Domain.NATURALS:
            head = [_scalar(ctx, v, path + ["head", i]) for i, v in enumerate(obj.get("head", []))]
            tail = _expr(ctx, obj["tail"], path + ["tail"]) if "tail" in obj else Expr()
            return SeqFn(head, tail)
        pieces = _pieces(ctx, obj, path)
        per = None
        if "tail" in obj:
            tail = obj["tail"]
            e = _expr(ctx, tail, path + ["tail"])
            start = max([p.hi for p in pieces], default=Fraction(0))
            if not e.is_zero:
                pieces.append(Piece(start, INF, e))
        if "periodic" in obj:
            pr = obj["periodic"]
            pp = path + ["periodic"]
            pattern = tuple((_scalar(ctx, a, pp), _scalar(ctx, b, pp), _scalar(ctx, v, pp))
                            for a, b, v in _need(ctx, pr, "pattern", pp))
            per = PeriodicTail(_scalar(ctx, _need(ctx, pr, "start", pp), pp + ["start"]),
                               _scalar(ctx, _need(ctx, pr, "period", pp), pp + ["period"]), pattern)
        return PiecewiseFn(dom, pieces, per)
    except ParseError:
        raise
    except RispacesError as exc:
        ctx.fail(path, str(exc))


def function_to_obj(f):
    if isinstance(f, SeqFn):
        return {"domain": "naturals", "head": [scalar_out(v) for v in f.head], "tail": expr_to_literal(f.tail)}
    out = {"domain": f.domain.value, "pieces": pieces_to_literal(f.pieces)}
    if f.periodic is not None:
        p = f.periodic
        out["periodic"] = {"start": scalar_out(p.start), "period": scalar_out(p.period),
                           "pattern": [[scalar_out(a), scalar_out(b), scalar_out(v)] for a, b, v in p.pattern]}
    return out


def parse_function(text: str):
    return function_from_obj(_load(text), _Ctx(text))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def phi_from_obj(obj, ctx=None, path=None, end=INF) -> QuasiConcaveFn:
    ctx = ctx or _Ctx(None)
    path = path or []
    if not isinstance(obj, dict):
        ctx.fail(path, "expected a generator object")
    if "end" in obj:
        end = _scalar(ctx, obj["end"], path + ["end"])
    try:
        named = obj.get("named")
        if named == "power":
            return QuasiConcaveFn.power(_scalar(ctx, _need(ctx, obj, "theta", path), path + ["theta"]), end)
        if named == "saturating":
            return QuasiConcaveFn.saturating(end)
        if named == "min_linear":
            return QuasiConcaveFn.min_linear(_scalar(ctx, obj.get("c", 1), path + ["c"]), end)
        if named == "constant":
            return QuasiConcaveFn.constant(_scalar(ctx, obj.get("c", 1), path + ["c"]), end)
        if named is not None:
            ctx.fail(path + ["named"], f"unknown generator {named!r}")
        phi0 = _scalar(ctx, obj["phi0"], path + ["phi0"]) if "phi0" in obj else None
        phiInf = _scalar(ctx, obj["phiInf"], path + ["phiInf"]) if "phiInf" in obj else None
        return QuasiConcaveFn(tuple(_pieces(ctx, obj, path)), end, phi0, phiInf)
    except ParseError:
        raise
    except RispacesError as exc:
        ctx.fail(path, str(exc))


def orlicz_from_obj(obj, ctx=None, path=None) -> OrliczFn:
    ctx = ctx or _Ctx(None)
    path = path or []
    if not isinstance(obj, dict):
        ctx.fail(path, "expected an Orlicz function object")
    try:
        named = obj.get("named")
        if named == "power":
            return OrliczFn.power(_scalar(ctx, _need(ctx, obj, "p", path), path + ["p"]))
        if named == "F_inf":
            return OrliczFn.F_inf()
        if named == "F_p_inf":
            return OrliczFn.F_p_inf(_scalar(ctx, _need(ctx, obj, "p", path), path + ["p"]))
        if named is not None:
            ctx.fail(path + ["named"], f"unknown Orlicz function {named!r}")
        bF = _scalar(ctx, obj.get("bF", "inf"), path + ["bF"])
        vb = _scalar(ctx, obj["valueAtbF"], path + ["valueAtbF"]) if obj.get("valueAtbF") is not None else None
        return OrliczFn(tuple(_pieces(ctx, obj, path)), bF, vb)
    except ParseError:
        raise
    except RispacesError as exc:
        ctx.fail(path, str(exc))


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

_KIND_ALIASES = {"sum": "sum_lp_linf", "cl": "calderon_lozanovskii", "ces": "cesaro"}


def space_from_obj(obj, ctx=None, path=None, domain=None) -> SpaceSpec:
    ctx = ctx or _Ctx(None)
    path = path or []
    kind = _need(ctx, obj, "kind", path)
    kind = _KIND_ALIASES.get(kind, kind)
    try:
        dom = Domain.parse(obj.get("domain", domain.value if domain else "halfline"))
    except ValueError as exc:
        ctx.fail(path + ["domain"], str(exc))
    end = Fraction(1) if dom is Domain.UNIT else INF
    try:
        if kind == "lp":
            return Lp(_scalar(ctx, _need(ctx, obj, "p", path), path + ["p"]), dom)
        if kind == "linf":
            return Linf(dom)
        if kind == "lorentz":
            return Lorentz(phi_from_obj(_need(ctx, obj, "phi", path), ctx, path + ["phi"], end), dom)
        if kind == "marcinkiewicz":
            return Marcinkiewicz(phi_from_obj(_need(ctx, obj, "phi", path), ctx, path + ["phi"], end), dom)
        if kind == "orlicz":
            return CalderonLozanovskii(Lp(1, dom), orlicz_from_obj(_need(ctx, obj, "F", path), ctx, path + ["F"]))
        if kind == "calderon_lozanovskii":
            base = space_from_obj(_need(ctx, obj, "base", path), ctx, path + ["base"], dom)
            return CalderonLozanovskii(base, orlicz_from_obj(_need(ctx, obj, "F", path), ctx, path + ["F"]))
        if kind == "sum_lp_linf":
            return SumLpLinf(_scalar(ctx, _need(ctx, obj, "p", path), path + ["p"]), dom)
        if kind == "intersection":
            return Intersection(space_from_obj(_need(ctx, obj, "left", path), ctx, path + ["left"], dom),
                                space_from_obj(_need(ctx, obj, "right", path), ctx, path + ["right"], dom))
        if kind == "cesaro":
            return Cesaro(space_from_obj(_need(ctx, obj, "base", path), ctx, path + ["base"], dom))
    except ParseError:
        raise
    except (RispacesError, ValueError) as exc:
        ctx.fail(path, str(exc))
    ctx.fail(path + ["kind"], f"unknown space kind {kind!r}")


def phi_to_obj(phi: QuasiConcaveFn):
    return {"pieces": pieces_to_literal(phi.pieces), "phi0": scalar_out(phi.phi0),
            "phiInf": scalar_out(phi.phiInf), "end": scalar_out(phi.end)}


def orlicz_to_obj(F: OrliczFn):
    out = {"pieces": pieces_to_literal(F.pieces), "bF": scalar_out(F.bF)}
    if F.valueAtbF is not None:
        out["valueAtbF"] = scalar_out(F.valueAtbF)
    return out


def space_to_obj(X: SpaceSpec):
    d = X.domain.value
    if isinstance(X, Lp):
        return {"kind": "lp", "p": scalar_out(X.p), "domain": d}
    if isinstance(X, Linf):
        return {"kind": "linf", "domain": d}
    if isinstance(X, Lorentz):
        return {"kind": "lorentz", "phi": phi_to_obj(X.phi_fn), "domain": d}
    if isinstance(X, Marcinkiewicz):
        return {"kind": "marcinkiewicz", "phi": phi_to_obj(X.phi_fn), "domain": d}
    if isinstance(X, CalderonLozanovskii):
        return {"kind": "calderon_lozanovskii", "base": space_to_obj(X.base), "F": orlicz_to_obj(X.F), "domain": d}
    if isinstance(X, SumLpLinf):
        return {"kind": "sum_lp_linf", "p": scalar_out(X.p), "domain": d}
    if isinstance(X, Intersection):
        return {"kind": "intersection", "left": space_to_obj(X.left), "right": space_to_obj(X.right), "domain": d}
    if isinstance(X, Cesaro):
        return {"kind": "cesaro", "base": space_to_obj(X.base), "domain": d}
    raise ValueError(f"cannot serialise {X!r}")


def parse_space(text: str) -> SpaceSpec:
    return space_from_obj(_load(text), _Ctx(text))


# ---------------------------------------------------------------------------
# jobs
# ---------------------------------------------------------------------------

COMMANDS = ("norm", "rearrange", "cesaro", "dist", "check", "witness", "report")
CHECKS = ("hudzik", "thm41", "thm46", "modular", "am", "discrete-oc")
_REQUIRED = {
    "norm": ["function", "space"],
    "rearrange": ["function"],
    "cesaro": ["function"],
    "dist": ["function", "space"],
    "witness": ["witness", "space"],
    "report": [],
    ("check", "hudzik"): ["function", "space"],
    ("check", "thm41"): ["function", "space", "a", "b"],
    ("check", "thm46"): ["function", "space"],
    ("check", "modular"): ["function", "space", "F", "M"],
    ("check", "am"): ["function", "g", "space"],
    ("check", "discrete-oc"): ["function", "space"],
}
_SCALAR_PARAMS = ("a", "b", "M", "k", "tol", "m", "eps")


@dataclass
class JobSpec:
    command: str
    check: Optional[str] = None
    function: object = None
    g: object = None
    space: Optional[SpaceSpec] = None
    F: Optional[OrliczFn] = None
    witness: Optional[dict] = None
    params: dict = field(default_factory=dict)
    format: str = "json"

    def to_obj(self):
        out = {"command": self.command}
        if self.check:
            out["check"] = self.check
        if self.function is not None:
            out["function"] = function_to_obj(self.function)
        if self.g is not None:
            out["g"] = function_to_obj(self.g)
        if self.space is not None:
            out["space"] = space_to_obj(self.space)
        if self.F is not None:
            out["F"] = orlicz_to_obj(self.F)
        if self.witness is not None:
            out["witness"] = self.witness
        for k, v in sorted(self.params.items()):
            out[k] = scalar_out(v)
        out["format"] = self.format
        return out


def _load(text: str):
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError("<json>", exc.lineno, exc.colno, exc.msg) from None


def parse_job(text: str) -> JobSpec:
    obj = _load(text)
    ctx = _Ctx(text)
    if not isinstance(obj, dict):
        ctx.fail([], "a job is a JSON object")
    cmd = _need(ctx, obj, "command", [])
    if cmd not in COMMANDS:
        ctx.fail(["command"], f"unknown command {cmd!r}")
    chk = None
    key = cmd
    if cmd == "check":
        chk = _need(ctx, obj, "check", [])
        if chk not in CHECKS:
            ctx.fail(["check"], f"unknown check {chk!r}")
        key = (cmd, chk)
    for req in _REQUIRED[key]:
        _need(ctx, obj, req, [])
    job = JobSpec(cmd, chk, format=obj.get("format", "json"))
    if job.format not in ("json", "csv", "table"):
        ctx.fail(["format"], f"unknown format {job.format!r}")
    if "space" in obj:
        job.space = space_from_obj(obj["space"], ctx, ["space"])
    dom = job.space.domain if job.space is not None else None
    if "function" in obj:
        job.function = function_from_obj(obj["function"], ctx, ["function"], dom)
    if "g" in obj:
        job.g = function_from_obj(obj["g"], ctx, ["g"], dom)
    if "F" in obj:
        job.F = orlicz_from_obj(obj["F"], ctx, ["F"])
    if "witness" in obj:
        w = obj["witness"]
        if not isinstance(w, dict) or "kind" not in w:
            ctx.fail(["witness"], 'expected an object with a "kind"')
        job.witness = _plain(w)
    for k in _SCALAR_PARAMS:
        if k in obj:
            job.params[k] = _scalar(ctx, obj[k], [k])
    for k in ("function", "g"):
        f = getattr(job, k)
        if f is not None and job.space is not None and f.domain != job.space.domain:
            ctx.fail([k, "domain"], f"function domain {f.domain.value} differs from space domain "
                                    f"{job.space.domain.value}")
    return job


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return scalar_out(x)
    return x


def serialize_job(job: JobSpec) -> str:
    return json.dumps(job.to_obj(), sort_keys=True, indent=2, ensure_ascii=False)
