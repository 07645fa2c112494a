"""Acceptance criteria 1-12, one test each, each printing a PASS/FAIL line."""

import time
from fractions import Fraction as Q

import pytest

from rispaces import (INF, Domain, Intersection, Linf, Lp, Marcinkiewicz, PiecewiseFn, QuasiConcaveFn, SumLpLinf,
                      cx_norm, dist_oc, norm)
from rispaces import suite

SEED, TOL = suite.DEFAULT_SEED, suite.DEFAULT_TOL
H = Domain.HALFLINE


def report(capsys, n, title, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance {n:2d}] {'PASS' if ok else 'FAIL'}  {title}  ({detail})")


def run_group(fn):
    t0 = time.perf_counter()
    rows = fn(SEED, TOL)
    return rows, time.perf_counter() - t0


def summary(rows):
    bad = [r.statement_id for r in rows if not r.passed]
    return f"{len(rows) - len(bad)}/{len(rows)} rows" + (f"; failing {bad}" if bad else "")


def test_c01_rearrangement_oracle(capsys):
    rows, dt = run_group(suite.rows_rearrangement)
    ok = all(r.passed for r in rows) and len(rows) == 3 and dt < 5
    report(capsys, 1, "rearrange vs sort-by-height oracle, 200 inputs per domain", ok, f"{summary(rows)}, {dt:.2f}s")
    assert ok


def test_c02_symmetry(capsys):
    rows, dt = run_group(suite.rows_symmetry)
    ok = all(r.passed and float(r.value) <= 1e-6 for r in rows) and dt < 30
    report(capsys, 2, "dist_oc(f) = dist_oc(f*) on 100 inputs x 3 spaces", ok, f"{summary(rows)}, {dt:.2f}s")
    assert ok


def test_c03_monotone_and_modulus(capsys):
    rows, dt = run_group(suite.rows_monotone_modulus)
    ok = all(r.passed for r in rows)
    report(capsys, 3, "monotonicity and modulus invariance of dist_oc, 100 pairs", ok, summary(rows))
    assert ok


def test_c04_dejonge(capsys):
    f = PiecewiseFn.step(H, [(0, 1, 2), (1, INF, 1)])
    d = dist_oc(f, SumLpLinf(2, H))
    rows, _ = run_group(suite.rows_dejonge)
    by = {r.statement_id: r for r in rows}
    ok = (d.value == 1 and d.path == "deJonge-closed-form"
          and abs(float(by["cor3.7:dejonge:limit-formula"].value) - 1) <= 1e-6
          and abs(float(by["lemma3.1:grid-minimisation"].value) - 1) <= 1e-3
          and all(r.passed for r in rows))
    report(capsys, 4, "closed form 1.0, limit formula within 1e-6, grid within 1e-3", ok, summary(rows))
    assert ok


def test_c05_marcinkiewicz_witness(capsys):
    rows, _ = run_group(suite.rows_marcinkiewicz)
    ok = len(rows) == 6 and all(r.passed for r in rows)
    ok = ok and all(abs(float(r.value) - 1) <= (1e-9 if ":norm:" in r.statement_id else 1e-6) for r in rows)
    report(capsys, 5, "psi' chi_(0,1) has M_phi norm 1 and dist 1, theta in {1/4,1/2,3/4}", ok, summary(rows))
    assert ok


def test_c06_cesaro_copy(capsys):
    rows, _ = run_group(suite.rows_cesaro_copy)
    one = PiecewiseFn.indicator(H, 0, INF)
    direct = [cx_norm(PiecewiseFn.indicator(H, b, INF), SumLpLinf(2, H)).value for b in (1, 10)]
    ok = all(r.passed for r in rows) and all(abs(float(v) - 1) <= 1e-6 for v in direct)
    ok = ok and norm(one, SumLpLinf(2, H)).value == 1
    report(capsys, 6, "hudzik, ||f* chi_(b,inf)||_CX = 1 for b in {1,10}, copy check", ok, summary(rows))
    assert ok


def test_c07_trivial_ideal(capsys):
    rows, _ = run_group(suite.rows_trivial_ideal)
    ces = cx_norm(PiecewiseFn.indicator(H, 0, 1), Linf(H))
    ok = all(r.passed for r in rows) and ces.value == 1 and ces.err_bound == 0
    report(capsys, 7, "trivial-ideal copy check on L_inf and (L_2+L_inf) cap L_inf; Ces_inf norm exact", ok,
           summary(rows))
    assert ok


def test_c08_fp_inf_isometry(capsys):
    rows, _ = run_group(suite.rows_fp_inf)
    ok = len(rows) == 2 and all(r.passed and float(r.value) <= 1e-9 for r in rows)
    report(capsys, 8, "X_{F_p,inf} norm = max(L_p, L_inf) on 50 inputs, p in {1,2}", ok, summary(rows))
    assert ok


def test_c09_luxemburg(capsys):
    rows, _ = run_group(suite.rows_luxemburg)
    ok = len(rows) == 3 and all(r.passed and float(r.value) <= 1e-9 for r in rows)
    report(capsys, 9, "Luxemburg x^p norm = L_p norm on 50 inputs, p in {1.5,2,3}", ok, summary(rows))
    assert ok


def test_c10_appendix(capsys):
    rows, _ = run_group(suite.rows_discrete)
    by = {r.statement_id: r for r in rows}
    ok = all(r.passed for r in rows) and abs(float(by["appendix:discrete-oc:chi_N:dist"].value) - 1) <= 1e-9
    report(capsys, 10, "discrete_oc_membership vs tail decay, 100 seqs on l_inf and l_2", ok, summary(rows))
    assert ok


def test_c11_witness(capsys):
    rows, _ = run_group(suite.rows_witness)
    subsets = [r for r in rows if "sum of members" in r.statement_id]
    ok = all(r.passed for r in rows) and len(subsets) == 2 ** 6 - 1 - 6
    report(capsys, 11, "disjoint-blocks k=6: disjointness, 63 norms, truncations m in {10,100}", ok, summary(rows))
    assert ok


def test_c12_whole_suite(capsys):
    t0 = time.perf_counter()
    rows = suite.run_paper_suite()
    dt = time.perf_counter() - t0
    ok = bool(rows) and all(r.passed for r in rows) and dt < 120
    report(capsys, 12, "run_paper_suite under 120 s with zero failures", ok, f"{summary(rows)}, {dt:.1f}s")
    assert ok
