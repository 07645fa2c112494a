import json
from fractions import Fraction as Q

import pytest
from hypothesis import given

from rispaces import INF, Domain, PiecewiseFn, SeqFn, SumLpLinf
from rispaces.errors import ParseError
from rispaces.literals import (function_from_obj, function_to_obj, parse_function, parse_job, parse_space,
                               serialize_job, space_to_obj)

from conftest import seqs, step_fns

NORM_JOB = """{
  "command": "norm",
  "function": {"domain": "halfline",
               "pieces": [{"lo": "0", "hi": "3/4", "kind": "const", "params": ["2"]}]},
  "space": {"kind": "lp", "p": 2}
}"""


def test_parse_norm_job():
    job = parse_job(NORM_JOB)
    assert job.command == "norm"
    assert job.function.pieces[0].hi == Q(3, 4)
    assert job.space.p == 2 and job.space.domain is Domain.HALFLINE


def test_missing_space_location():
    text = NORM_JOB.replace(',\n  "space": {"kind": "lp", "p": 2}', "")
    with pytest.raises(ParseError) as e:
        parse_job(text)
    assert e.value.field == "space"
    assert (e.value.line, e.value.col) == (1, 1)


def test_bad_field_location():
    text = NORM_JOB.replace('"kind": "const"', '"kind": "cubic"')
    with pytest.raises(ParseError) as e:
        parse_job(text)
    assert e.value.field == "function.pieces.0.kind"
    assert e.value.line == 4


def test_decimal_and_rational_scalars():
    f = parse_function('{"domain": "unit", "pieces": [{"lo": 0.25, "hi": "1/3", "kind": "const", "params": ["0.1"]}]}')
    p = f.pieces[0]
    assert (p.lo, p.hi, p.expr.const_value()) == (Q(1, 4), Q(1, 3), Q(1, 10))


def test_sequence_literal():
    x = function_from_obj({"domain": "naturals", "head": [1, "1/2"], "tail": {"kind": "hyp", "params": [1, 0]}})
    assert isinstance(x, SeqFn) and x(2) == Q(1, 2) and x(4) == Q(1, 4)


def test_space_roundtrip():
    X = parse_space('{"kind": "intersection", "left": {"kind": "sum", "p": 2}, "right": {"kind": "linf"}}')
    assert parse_space(json.dumps(space_to_obj(X))) == X
    assert space_to_obj(SumLpLinf(2))["kind"] == "sum_lp_linf"


def test_job_roundtrip_idempotent():
    once = serialize_job(parse_job(NORM_JOB))
    assert serialize_job(parse_job(once)) == once


@given(step_fns(Domain.HALFLINE, signed=True, flat_tail=True))
def test_function_roundtrip(f):
    assert function_from_obj(json.loads(json.dumps(function_to_obj(f)))) == f


@given(seqs())
def test_sequence_roundtrip(x):
    assert function_from_obj(json.loads(json.dumps(function_to_obj(x)))) == x
