import csv
import io
import json

import pytest
from hypothesis import given, strategies as st

from seuguard.report import (
    CSV_COLUMNS, AnalysisReport, VariableResult, efficiency, emit_report, format_eta, summary_table,
)
from seuguard.verdict import CRV, INTRODUCING, NON_CRV, UNKNOWN, Verdict


def _report():
    rs = [
        VariableResult("a", True, Verdict("a", CRV, INTRODUCING)),
        VariableResult("b", True, Verdict("b", NON_CRV)),
        VariableResult("c", False, Verdict("c", NON_CRV, engine="slice", pruned=True)),
        VariableResult("d", True, Verdict("d", UNKNOWN)),
    ]
    return AnalysisReport("demo", 12, "o ≤ 3", ["a", "b", "c", "d"], ["a", "b", "d"], rs, {"unwind": 4})


def test_eta_worked_example():
    assert efficiency(4, 1) == 25.0
    assert format_eta(4, 1) == "25%"


def test_eta_edge_cases():
    assert efficiency(0, 0) is None and format_eta(0, 0) == "n/a"
    assert format_eta(3, 1) == "33.3%"
    assert format_eta(4, 2) == "50%"
    assert format_eta(4, 0) == "0%"


@given(st.integers(1, 500), st.data())
def test_eta_bounds(s, data):
    m = data.draw(st.integers(0, s))
    assert 0.0 <= efficiency(s, m) <= 100.0


def test_aggregates():
    r = _report()
    assert (r.T, r.S, r.M) == (4, 3, 1)
    assert r.unknown_count == 1
    assert r.crvs == ["a", "d"]  # Unknown counts as CRV
    assert r.row() == ["demo", "12", "4", "3", "1", "33.3%", "o ≤ 3"]


def test_pruned_nonrelevant_not_counted_in_m():
    r = _report()
    assert "c" not in r.relevant and r.M == 1


def test_json_schema():
    d = json.loads(emit_report(_report(), "json"))
    assert d["schema"] == 1
    assert (d["T"], d["S"], d["M"], d["eta_text"]) == (4, 3, 1, "33.3%")
    assert [v["variable"] for v in d["variables"]] == ["a", "b", "c", "d"]
    assert "seconds" not in d["variables"][0]
    d2 = json.loads(emit_report(_report(), "json", timings=True))
    assert "seconds" in d2["variables"][0]


def test_json_byte_stable():
    assert emit_report(_report(), "json") == emit_report(_report(), "json")


def test_csv():
    rows = list(csv.DictReader(io.StringIO(emit_report(_report(), "csv"))))
    assert list(rows[0].keys()) == CSV_COLUMNS
    assert [r["kind"] for r in rows] == ["variable"] * 4 + ["summary"]
    assert rows[-1]["eta"] == "33.3%" and rows[-1]["S"] == "3"
    assert rows[0]["direction"] == INTRODUCING


def test_table():
    out = emit_report(_report(), "table")
    assert out.splitlines()[0].startswith("Program Name")
    assert "counted as CRV" in out
    assert "demo" in summary_table([_report()])


def test_differential_mismatch_flag():
    r = VariableResult("a", True, Verdict("a", CRV, INTRODUCING), oracle=Verdict("a", NON_CRV))
    assert r.mismatch
    assert not VariableResult("a", True, Verdict("a", NON_CRV), oracle=Verdict("a", NON_CRV)).mismatch


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(_report(), "xml")
