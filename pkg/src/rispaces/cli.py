"""Command-line front end.

Exit codes: 0 success or passing check, 1 failing check, 2 error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from fractions import Fraction

from .cesaro import cesaro_apply, cx_norm
from .errors import ParseError, RispacesError
from .ideal import (am_property_probe, build_witness, cesaro_copy_check, discrete_oc_dist, discrete_oc_membership,
                    dist_oc, hudzik_check, modular_domination_check, trivial_ideal_copy_check, verify_witness)
from .literals import (CHECKS, function_from_obj, function_to_obj, parse_job, phi_from_obj, serialize_job)
from .measurable import PiecewiseFn
from .profiles import Rearranged, bracket, rearrange
from .scalars import INF, to_json_scalar
from .spaces import norm
from .suite import DEFAULT_SEED, run_paper_suite

COLUMNS = ["statement_id", "input_digest", "value", "err_bound", "target", "tol", "pass"]
NUMERIC_TOL = 1e-6
EXACT_TOL = 1e-9


def _digest(job) -> str:
    return hashlib.sha256(serialize_job(job).encode()).hexdigest()[:12]


def _row(sid, dig, value, err=0.0, target="", tol="", passed=""):
    return {"statement_id": sid, "input_digest": dig, "value": to_json_scalar(value), "err_bound": err,
            "target": to_json_scalar(target) if target != "" else "", "tol": tol, "pass": passed}


def run_job(job, seed=DEFAULT_SEED, require_bound_rule=False, filter=None):
    """Execute a parsed job; returns (payload dict, rows for csv/table, exit code)."""
    tol = float(job.params.get("tol", NUMERIC_TOL))
    dig = _digest(job)
    cmd = job.command
    if cmd == "norm":
        r = norm(job.function, job.space, min(tol, 1e-12))
        return {"command": cmd, "result": r.to_dict()}, [_row("norm", dig, r.value, r.err_bound)], 0
    if cmd == "rearrange":
        fs = rearrange(job.function)
        if isinstance(fs, Rearranged):
            br = bracket(fs, tol)
            payload = {"command": cmd, "exact": False, "eps": to_json_scalar(br.eps), "gap": br.gap,
                       "estimate": function_to_obj(br.estimate), "lower": function_to_obj(br.lower),
                       "upper": function_to_obj(br.upper)}
            rows = [_row(f"rearrange:piece[{p.lo},{p.hi}]", dig, p.expr.const_value(), br.gap / 2)
                    for p in br.estimate.pieces]
        else:
            payload = {"command": cmd, "exact": True, "result": function_to_obj(fs)}
            rows = [_row("rearrange:f*(inf)", dig, fs.star_inf()), _row("rearrange:f*(0+)", dig, fs.ess_sup())]
        return payload, rows, 0
    if cmd == "cesaro":
        c = cesaro_apply(job.function)
        payload = {"command": cmd, "result": function_to_obj(c)}
        rows = []
        if job.space is not None:
            r = cx_norm(job.function, job.space, min(tol, 1e-12))
            payload["cx_norm"] = r.to_dict()
            rows.append(_row("cesaro:cx_norm", dig, r.value, r.err_bound))
        return payload, rows, 0
    if cmd == "dist":
        d = dist_oc(job.function, job.space, tol)
        return ({"command": cmd, "result": d.to_dict()},
                [_row(f"dist:{d.path}", dig, d.value, d.err_bound)], 0)
    if cmd == "check":
        rep = _run_check(job, tol, require_bound_rule)
        rows = [_row(f"{rep.criterion}:{c.description}", dig, c.value, c.err_bound, c.target, c.tol, c.passed)
                for c in rep.clauses]
        return {"command": cmd, "check": job.check, "report": rep.to_dict()}, rows, 0 if rep.overall else 1
    if cmd == "witness":
        w = dict(job.witness)
        kind = w.pop("kind")
        kw = {"k": int(w.get("k", job.params.get("k", 4)))}
        if kind == "disjoint-blocks":
            kw["f"] = job.function if job.function is not None else function_from_obj(w["f"])
        else:
            kw["phi"] = phi_from_obj(w["phi"], end=Fraction(1) if job.space.domain.value == "unit" else INF)
            if "a" in w:
                kw["a"] = Fraction(str(w["a"]))
        W = build_witness(kind, **kw)
        trunc = tuple(int(m) for m in w.get("truncations", []))
        rep = verify_witness(W, job.space, tol, truncations=trunc)
        rows = [_row(f"witness:{c.description}", dig, c.value, c.err_bound, c.target, c.tol, c.passed)
                for c in rep.clauses]
        payload = {"command": cmd, "members": [function_to_obj(m) for m in W.members], "report": rep.to_dict()}
        return payload, rows, 0 if rep.overall else 1
    if cmd == "report":
        return _report(seed, job.params.get("tol"), filter)
    raise RispacesError(f"unknown command {cmd}")


def _run_check(job, tol, require_bound_rule):
    c, f, X = job.check, job.function, job.space
    if c == "hudzik":
        return hudzik_check(f, X, tol)
    if c == "thm41":
        return cesaro_copy_check(f, job.params["a"], job.params["b"], X, tol, require_bound_rule)
    if c == "thm46":
        return trivial_ideal_copy_check(f, X, tol)
    if c == "modular":
        return modular_domination_check(job.F, X, f, job.params["M"], tol)
    if c == "am":
        return am_property_probe(f, job.g, X, tol)
    if c == "discrete-oc":
        from .ideal import CheckReport

        rep = CheckReport("discrete-oc", verdict="x lies in the order-continuous part of CX")
        member = discrete_oc_membership(f, X, tol)
        d = discrete_oc_dist(f, X, tol)
        rep.add("dist(C_d|x|, X_a)", d.value, 0, tol, passed=member, err_bound=d.err_bound)
        return rep
    raise RispacesError(f"unknown check {c}")


def _report(seed, tol, filter):
    kw = {"seed": seed, "filter": filter}
    if tol is not None:
        kw["tol"] = float(tol)
    rows = [r.to_dict() for r in run_paper_suite(**kw)]
    ok = all(r["pass"] for r in rows)
    payload = {"command": "report", "seed": seed, "rows": rows, "overall": ok,
               "failed": [r["statement_id"] for r in rows if not r["pass"]]}
    return payload, rows, 0 if ok else 1


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def render(payload, rows, fmt, header=None) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, default=str)
    if fmt == "csv":
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in COLUMNS})
        return buf.getvalue().rstrip("\n")
    cells = [[str(r.get(k, "")) for k in COLUMNS] for r in rows]
    widths = [max([len(c)] + [len(x[i]) for x in cells]) for i, c in enumerate(COLUMNS)]
    lines = [header] if header else []
    lines.append("  ".join(c.ljust(w) for c, w in zip(COLUMNS, widths)))
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _literal(text):
    """A JSON literal given inline or as @path."""
    if text is None:
        return None
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError("<argument>", exc.lineno, exc.colno, exc.msg) from None


def _job_text(args) -> str:
    if args.command == "job":
        src = args.file
        if src == "-":
            return sys.stdin.read()
        with open(src, encoding="utf-8") as fh:
            return fh.read()
    obj = {"command": args.command, "format": args.format}
    if args.command == "check":
        obj["check"] = args.check
    for key in ("function", "space", "g", "F", "witness"):
        v = _literal(getattr(args, key, None))
        if v is not None:
            obj[key] = v
    for key in ("a", "b", "M", "k"):
        v = getattr(args, key, None)
        if v is not None:
            obj[key] = v
    if args.tol is not None:
        obj["tol"] = args.tol
    return json.dumps(obj, default=lambda x: to_json_scalar(x))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=str, default=None, help="algorithm tolerance")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--filter", default=None, help="glob or substring on statement ids (report)")
    common.add_argument("--require-bound-rule", action="store_true",
                        help="fail thm41 checks unless boundedness of C is in the rule table")

    p = argparse.ArgumentParser(prog="rispaces", description="Norms, rearrangements and order-continuity "
                                "checks in rearrangement-invariant spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def fn_args(sp, space=True, space_required=True):
        sp.add_argument("-f", "--function", required=True, help="function literal (JSON or @file)")
        if space:
            sp.add_argument("-s", "--space", required=space_required, help="space literal (JSON or @file)")

    fn_args(sub.add_parser("norm", parents=[common], help="norm of f in X"))
    fn_args(sub.add_parser("rearrange", parents=[common], help="decreasing rearrangement"), space=False)
    fn_args(sub.add_parser("cesaro", parents=[common], help="Cesàro image (and CX norm with -s)"),
            space_required=False)
    fn_args(sub.add_parser("dist", parents=[common], help="distance to the order-continuous ideal"))
    ck = sub.add_parser("check", parents=[common], help="criterion checks")
    ck.add_argument("check", choices=CHECKS)
    fn_args(ck)
    ck.add_argument("-g", help="second function (am)")
    ck.add_argument("-F", help="Orlicz function literal (modular)")
    ck.add_argument("-a", type=str)
    ck.add_argument("-b", type=str)
    ck.add_argument("-M", type=str)
    wt = sub.add_parser("witness", parents=[common], help="build and verify an l_inf witness family")
    wt.add_argument("-w", "--witness", required=True, help='witness literal, e.g. {"kind": "disjoint-blocks"}')
    wt.add_argument("-f", "--function", help="flat function for disjoint blocks")
    wt.add_argument("-s", "--space", required=True)
    wt.add_argument("-k", type=int)
    sub.add_parser("report", parents=[common], help="run the reproduction suite")
    jb = sub.add_parser("job", parents=[common], help="run a JSON job file ('-' for stdin)")
    jb.add_argument("file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format
    try:
        text = _job_text(args)
        job = parse_job(text)
        if args.command == "job":
            fmt = job.format if "--format" not in (argv or sys.argv) else fmt
        payload, rows, code = run_job(job, seed=args.seed, require_bound_rule=args.require_bound_rule,
                                      filter=args.filter)
        header = f"seed={args.seed}" if job.command == "report" else None
        print(render(payload, rows, fmt, header))
        if code == 1 and job.command == "report":
            extra = f" --tol {args.tol}" if args.tol is not None else ""
            for sid in payload["failed"]:
                print(f"reproduce: rispaces report --seed {args.seed}{extra} --filter '{sid}'", file=sys.stderr)
        return code
    except RispacesError as exc:
        err = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, ParseError):
            err.update({"field": exc.field, "line": exc.line, "col": exc.col})
        print(json.dumps(err, sort_keys=True, ensure_ascii=False))
        return 2
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": "error", "message": str(exc)}, ensure_ascii=False))
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
