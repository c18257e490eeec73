"""JSON and CSV serialization of verification reports and study tables.

Floats are written in Python's shortest round-trip representation, so parsing
an emitted report reproduces every numeric field exactly.  Non-finite values
are written as JSON ``null`` and as empty CSV cells.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Union

import numpy as np

from . import __version__
from .verify import StudyTable, VerificationReport

__all__ = ["CSV_COLUMNS", "report_to_dict", "study_to_dict", "emit_report", "parse_report"]

CSV_COLUMNS = ("theorem_id", "d", "s", "p", "k", "alpha", "beta", "q", "lhs", "hardy", "constant", "rhs",
               "margin", "sigma", "pass")


def _clean(x):
    """Recursively convert to JSON-safe builtins (non-finite floats -> None)."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    try:
        f = float(x)
    except (TypeError, ValueError):
        return str(x)
    return f if math.isfinite(f) else None


def _est(e) -> dict:
    return {"value": e.value, "std_error": e.std_error}


def report_to_dict(r: VerificationReport) -> dict:
    return _clean({
        "theorem_id": r.theorem_id,
        "params": r.params,
        "lhs": _est(r.lhs),
        "hardy": _est(r.hardy_term),
        "constant": r.constant,
        "rhs": _est(r.remainder_or_rhs),
        "margin": r.margin,
        "sigma": r.sigma,
        "pass": r.passed,
        "empirical_ratio": r.empirical_ratio,
        "skipped": r.skipped,
        "function": r.function,
        "note": r.note,
        "seed": r.seed,
        "spec": r.spec,
        "version": r.version,
    })


def study_to_dict(t: StudyTable) -> dict:
    return _clean({
        "study_id": t.study_id,
        "params": t.params,
        "columns": list(t.columns),
        "rows": [dict(zip(t.columns, row)) for row in t.rows],
        "summary": t.summary,
        "pass": t.passed,
        "seed": t.seed,
        "spec": t.spec,
        "version": t.version,
    })


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ""
    return str(x)


def _report_row(r: VerificationReport) -> list:
    p = r.params
    vals = [r.theorem_id, p.get("d"), p.get("s"), p.get("p"), p.get("k"), p.get("alpha"), p.get("beta"),
            p.get("q"), r.lhs.value, r.hardy_term.value, r.constant, r.remainder_or_rhs.value, r.margin,
            r.sigma, r.passed]
    return [_fmt(v) for v in vals]


def _csv(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode()


def emit_report(obj: Union[VerificationReport, StudyTable, Iterable[VerificationReport]], fmt: str = "json",
                config: dict = None) -> bytes:
    """Serialize a report, a suite (list of reports) or a study table.

    JSON suites have the shape {"version", "config", "pass", "results": [...]};
    ``config`` records the full resolved run configuration when given.
    """
    if fmt not in ("json", "csv"):
        raise ValueError("format must be json or csv")
    if isinstance(obj, StudyTable):
        if fmt == "json":
            d = study_to_dict(obj)
            if config is not None:
                d["config"] = _clean(config)
            return (json.dumps(d, indent=2, sort_keys=True, allow_nan=False) + "\n").encode()
        cols = obj.csv_columns or obj.columns
        rows = []
        for row in obj.rows:
            named = dict(zip(obj.columns, row))
            rows.append([_fmt(named[c] if c in named else obj.summary.get(c)) for c in cols])
        return _csv(cols, rows)
    reports = [obj] if isinstance(obj, VerificationReport) else list(obj)
    if fmt == "csv":
        return _csv(CSV_COLUMNS, [_report_row(r) for r in reports])
    if isinstance(obj, VerificationReport):
        d = report_to_dict(obj)
    else:
        d = {"version": __version__, "pass": all(r.passed for r in reports),
             "results": [report_to_dict(r) for r in reports]}
    if config is not None:
        d["config"] = _clean(config)
    return (json.dumps(d, indent=2, sort_keys=True, allow_nan=False) + "\n").encode()


def parse_report(data: bytes, fmt: str = "json"):
    """Inverse of :func:`emit_report` at the level of builtins (dict for JSON, list of dicts for CSV)."""
    text = data.decode()
    if fmt == "json":
        return json.loads(text)
    return list(csv.DictReader(io.StringIO(text)))
