import json

import pytest

from rispaces.cli import main

ONE = '{"domain": "halfline", "pieces": [{"lo": "0", "hi": "inf", "kind": "const", "params": ["1"]}]}'
STEP = ('{"domain": "halfline", "pieces": [{"lo": "0", "hi": "1", "kind": "const", "params": ["2"]},'
        ' {"lo": "1", "hi": "inf", "kind": "const", "params": ["1"]}]}')
SUM2 = '{"kind": "sum_lp_linf", "p": 2}'


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_dist_job(capsys):
    code, out = run(capsys, "dist", "-f", STEP, "-s", SUM2)
    res = json.loads(out.out)["result"]
    assert code == 0
    assert res["value"] == "1" and res["path"] == "deJonge-closed-form"


def test_thm41_passes(capsys):
    code, out = run(capsys, "check", "thm41", "-f", ONE, "-s", SUM2, "-a", "0", "-b", "1")
    assert code == 0 and json.loads(out.out)["report"]["overall"]


def test_thm46_fails_clause_one(capsys):
    f = '{"domain": "halfline", "pieces": [{"lo": "1", "hi": "2", "kind": "const", "params": ["1"]}]}'
    code, out = run(capsys, "check", "thm46", "-f", f, "-s", '{"kind": "linf"}')
    assert code == 1
    assert json.loads(out.out)["report"]["clauses"][0]["pass"] is False


def test_require_bound_rule(capsys):
    marc = '{"kind": "marcinkiewicz", "phi": {"named": "power", "theta": "1/2"}, "domain": "unit"}'
    f = '{"domain": "unit", "pieces": [{"lo": "0", "hi": "1", "kind": "pow", "params": ["1/2", "-1/2"]}]}'
    _, loose = run(capsys, "check", "thm41", "-f", f, "-s", marc, "-a", "0", "-b", "1/2")
    strict, out = run(capsys, "check", "thm41", "-f", f, "-s", marc, "-a", "0", "-b", "1/2", "--require-bound-rule")
    rule = "C bounded on X (rule table)"
    assert rule not in loose.out and "not in the rule table" in loose.out
    assert strict == 1 and rule in out.out


def test_parse_error_exit_2(capsys):
    code, out = run(capsys, "norm", "-f", ONE, "-s", '{"kind": "lp"}')
    err = json.loads(out.out)
    assert code == 2 and err["error"] == "parse_error" and err["field"] == "space.p"


def test_domain_error_exit_2(capsys):
    f = '{"domain": "unit", "pieces": [{"lo": "0", "hi": "1", "kind": "const", "params": ["1"]}]}'
    code, out = run(capsys, "norm", "-f", f, "-s", '{"kind": "lp", "p": 2, "domain": "halfline"}')
    assert code == 2 and json.loads(out.out)["error"]


def test_csv_columns(capsys):
    code, out = run(capsys, "norm", "-f", STEP, "-s", SUM2, "--format", "csv")
    assert out.out.splitlines()[0] == "statement_id,input_digest,value,err_bound,target,tol,pass"


def test_job_file_and_at_file(tmp_path, capsys):
    fn = tmp_path / "f.json"
    fn.write_text(STEP)
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "dist", "function": json.loads(STEP), "space": json.loads(SUM2)}))
    c1, o1 = run(capsys, "job", str(job))
    c2, o2 = run(capsys, "dist", "-f", f"@{fn}", "-s", SUM2)
    assert c1 == c2 == 0
    assert json.loads(o1.out)["result"] == json.loads(o2.out)["result"]


def test_witness_table(capsys):
    code, out = run(capsys, "witness", "-w", '{"kind": "disjoint-blocks", "k": 3, "truncations": [10]}',
                    "-f", ONE, "-s", SUM2, "--format", "table")
    assert code == 0 and "||sum - f* chi_(1/10,10)|| >= 1" in out.out


def test_report_filter_deterministic(capsys):
    c1, o1 = run(capsys, "report", "--filter", "thm3.5", "--format", "csv")
    c2, o2 = run(capsys, "report", "--filter", "thm3.5", "--format", "csv")
    assert c1 == 0 and o1.out == o2.out
    lines = o1.out.splitlines()
    assert lines[0] == "# seed=20240229"
    assert all(line.startswith("thm3.5:symmetry") for line in lines[2:])


def test_report_tampered_tolerance(capsys):
    code, out = run(capsys, "report", "--filter", "luxemburg", "--tol", "0.1", "--format", "json")
    rows = json.loads(out.out)["rows"]
    assert code == 1 and rows and not any(r["pass"] for r in rows)
    assert "reproduce: rispaces report" in out.err
