"""Per-program aggregates (T, S, M, efficiency) and their renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

from .verdict import CRV, NON_CRV, UNKNOWN, Verdict

FORMATS = ("table", "json", "csv")
SCHEMA_VERSION = 1


def efficiency(s: int, m: int) -> Optional[float]:
    """Share of slice-retained variables that checking proves irrelevant, in percent."""
    if s == 0:
        return None
    return 100.0 * m / s


def format_eta(s: int, m: int) -> str:
    eta = efficiency(s, m)
    if eta is None:
        return "n/a"
    if eta == int(eta):
        return f"{int(eta)}%"
    return f"{eta:.1f}%"


@dataclass
class VariableResult:
    variable: str
    in_slice: bool
    verdict: Verdict
    seconds: float = 0.0
    oracle: Optional[Verdict] = None  # differential runs only

    @property
    def mismatch(self) -> bool:
        return self.oracle is not None and self.oracle.key() != self.verdict.key()


@dataclass
class AnalysisReport:
    program: str
    loc: int
    phi_text: str  # rendered property, e.g. "output ≤ 10"
    variables: list  # declaration order
    relevant: list  # slice-retained variables, declaration order
    per_variable: list = field(default_factory=list)  # VariableResult, declaration order
    config: dict = field(default_factory=dict)
    engine: str = "checker"

    @property
    def T(self) -> int:
        return len(self.variables)

    @property
    def S(self) -> int:
        return len(self.relevant)

    @property
    def M(self) -> int:
        return sum(1 for r in self.per_variable if r.in_slice and r.verdict.classification == NON_CRV)

    @property
    def eta(self) -> Optional[float]:
        return efficiency(self.S, self.M)

    @property
    def eta_text(self) -> str:
        return format_eta(self.S, self.M)

    @property
    def unknown_count(self) -> int:
        return sum(1 for r in self.per_variable if r.verdict.classification == UNKNOWN)

    @property
    def crvs(self) -> list:
        """Variables to harden: proven CRVs plus Unknowns (counted conservatively)."""
        return [r.variable for r in self.per_variable if r.verdict.classification in (CRV, UNKNOWN)]

    @property
    def mismatches(self) -> list:
        return [r for r in self.per_variable if r.mismatch]

    def row(self) -> list:
        return [self.program, str(self.loc), str(self.T), str(self.S), str(self.M), self.eta_text, self.phi_text]

    def to_dict(self, timings: bool = False) -> dict:
        def var(r: VariableResult):
            d = {"in_slice": r.in_slice}
            d.update(r.verdict.to_dict())
            if r.oracle is not None:
                d["oracle"] = r.oracle.to_dict()
                d["agree"] = not r.mismatch
            if timings:
                d["seconds"] = round(r.seconds, 4)
            return d

        return {
            "schema": SCHEMA_VERSION,
            "program": self.program,
            "loc": self.loc,
            "T": self.T,
            "S": self.S,
            "M": self.M,
            "eta": None if self.eta is None else round(self.eta, 4),
            "eta_text": self.eta_text,
            "phi": self.phi_text,
            "engine": self.engine,
            "relevant_variables": list(self.relevant),
            "crv": self.crvs,
            "unknown_count": self.unknown_count,
            "mismatch_count": len(self.mismatches),
            "config": self.config,
            "variables": [var(r) for r in self.per_variable],
        }


HEADER = ["Program Name", "LoC", "T", "S", "M", "η", "Φ"]


def _table(rows, header) -> str:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    fmt = lambda r: " | ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip()
    lines = [fmt(header), "-+-".join("-" * w for w in widths)]
    lines += [fmt(r) for r in rows]
    return "\n".join(lines)


def _cex_summary(v: Verdict) -> str:
    c = v.counterexample
    if c is None:
        return ""
    ins = ", ".join(f"{k}={val}" for k, val in c.input_vector.to_dict().items())
    line = c.hook_site.line if c.hook_site is not None else "?"
    return f"{ins}; flip bit {c.bit_position} at use #{c.occurrence} (line {line})"


def summary_table(reports) -> str:
    return _table([r.row() for r in reports], HEADER)


def emit_report(report: AnalysisReport, fmt: str = "table", timings: bool = False) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(timings), indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        return _csv(report, timings)
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    out = [summary_table([report]), ""]
    rows = []
    for r in report.per_variable:
        v = r.verdict
        cls = v.classification + (f" ({v.direction})" if v.direction else "")
        row = [r.variable, "yes" if r.in_slice else "no", cls, v.engine, _cex_summary(v)]
        if r.oracle is not None:
            row.insert(4, ("agree" if not r.mismatch else "MISMATCH: " + r.oracle.classification))
        if timings:
            row.insert(4, f"{r.seconds:.2f}s")
        rows.append(row)
    header = ["variable", "in slice", "verdict", "engine", "counterexample"]
    if report.per_variable and report.per_variable[0].oracle is not None:
        header.insert(4, "oracle")
    if timings:
        header.insert(4, "time")
    out.append(_table(rows, header))
    if report.unknown_count:
        out.append(f"\n{report.unknown_count} variable(s) Unknown (bound exhausted); counted as CRV.")
    for r in report.per_variable:
        for d in r.verdict.diagnostics:
            if not r.verdict.pruned:
                out.append(f"note: {r.variable}: {d}")
    return "\n".join(out) + "\n"


CSV_COLUMNS = ["kind", "program", "variable", "in_slice", "classification", "direction", "engine",
               "bit", "occurrence", "line", "loc", "T", "S", "M", "eta", "phi"]


def _csv(report: AnalysisReport, timings: bool) -> str:
    cols = CSV_COLUMNS + (["seconds"] if timings else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in report.per_variable:
        v = r.verdict
        c = v.counterexample
        row = {
            "kind": "variable",
            "program": report.program,
            "variable": r.variable,
            "in_slice": int(r.in_slice),
            "classification": v.classification,
            "direction": v.direction or "",
            "engine": v.engine,
            "bit": c.bit_position if c else "",
            "occurrence": c.occurrence if c else "",
            "line": c.hook_site.line if c and c.hook_site else "",
        }
        if timings:
            row["seconds"] = f"{r.seconds:.4f}"
        w.writerow(row)
    w.writerow({
        "kind": "summary", "program": report.program, "loc": report.loc, "T": report.T,
        "S": report.S, "M": report.M, "eta": report.eta_text, "phi": report.phi_text,
    })
    return buf.getvalue()
