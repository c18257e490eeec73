import json
import math

import pytest

from frachardy.constants import HardyParams
from frachardy.functions import make_bump
from frachardy.quadrature.estimate import IntegralEstimate
from frachardy.quadrature.functionals import QuadratureSpec
from frachardy.report import CSV_COLUMNS, emit_report, parse_report
from frachardy.verify import StudyTable, VerificationReport, check_hardy

SPEC = QuadratureSpec(samples=20_000, seed=5)


@pytest.fixture(scope="module")
def reports():
    hp = HardyParams(2, 0.6, 2.0, 1, 0.1, 0.05)
    return [check_hardy(make_bump((0.5 + 0.1 * j, 0.2), 0.3), hp, SPEC) for j in range(3)]


def test_json_round_trip_exact(reports):
    d = parse_report(emit_report(reports[0]))
    r = reports[0]
    assert d["lhs"] == {"value": r.lhs.value, "std_error": r.lhs.std_error}
    assert d["hardy"]["value"] == r.hardy_term.value
    assert d["rhs"]["value"] == r.remainder_or_rhs.value
    assert d["margin"] == r.margin and d["sigma"] == r.sigma and d["constant"] == r.constant
    assert d["pass"] is r.passed and d["seed"] == 5 and d["spec"]["samples"] == 20_000
    assert d["params"] == {"d": 2, "s": 0.6, "p": 2.0, "k": 1, "alpha": 0.1, "beta": 0.05}
    assert d["theorem_id"] == "hardy" and "version" in d


def test_csv_round_trip_exact(reports):
    rows = parse_report(emit_report(reports, "csv"), "csv")
    assert len(rows) == 3
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    for row, r in zip(rows, reports):
        assert float(row["lhs"]) == r.lhs.value
        assert float(row["margin"]) == r.margin
        assert float(row["sigma"]) == r.sigma
        assert row["pass"] == ("true" if r.passed else "false")
        assert row["q"] == ""


def test_csv_header_fixed():
    assert ",".join(CSV_COLUMNS) == "theorem_id,d,s,p,k,alpha,beta,q,lhs,hardy,constant,rhs,margin,sigma,pass"
    assert emit_report([], "csv").decode().strip() == ",".join(CSV_COLUMNS)


def test_empty_suite():
    d = json.loads(emit_report([]))
    assert d["results"] == [] and d["pass"] is True


def test_suite_json_with_config(reports):
    d = json.loads(emit_report(reports, config={"seed": 5}))
    assert d["config"] == {"seed": 5} and len(d["results"]) == 3


def test_non_finite_becomes_null():
    e = IntegralEstimate(math.inf)
    r = VerificationReport("hardy", {"d": 2}, e, IntegralEstimate(1.0), 1.0, IntegralEstimate(0.0), math.nan, 0.0)
    d = json.loads(emit_report(r))
    assert d["lhs"]["value"] is None and d["margin"] is None
    row = parse_report(emit_report([r], "csv"), "csv")[0]
    assert row["lhs"] == "" and row["margin"] == ""


def test_study_table():
    t = StudyTable("demo", {"d": 2}, ("eps", "psi"), ((0.2, 1.5), (0.1, 1.0)), {"slope": 0.5}, True,
                   csv_columns=("eps", "psi", "slope"))
    rows = parse_report(emit_report(t, "csv"), "csv")
    assert list(rows[0]) == ["eps", "psi", "slope"]
    assert [float(r["slope"]) for r in rows] == [0.5, 0.5]
    d = json.loads(emit_report(t))
    assert d["rows"][1] == {"eps": 0.1, "psi": 1.0} and d["pass"] is True


def test_bad_format(reports):
    with pytest.raises(ValueError):
        emit_report(reports, "xml")


def test_reports_reproducible():
    hp = HardyParams(2, 0.6, 2.0, 1)
    u = make_bump((0.6, 0.0), 0.4)
    assert emit_report(check_hardy(u, hp, SPEC)) == emit_report(check_hardy(u, hp, SPEC))
