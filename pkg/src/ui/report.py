"""
Report rendering: JSON-Lines findings, stderr summary tables, triage tables.
"""

import json
from collections.abc import Iterable
from typing import Any, TextIO

import pandas as pd

from detect.issues import Issue
from detect.smells import SmellFinding
from triage.summary import CountMatrix, SummaryStats

OUTPUT_FORMATS = ("text", "csv", "jsonl")

SCORE_DIGITS = 6


def issue_record(issue: Issue) -> dict[str, Any]:
    return {
        "id": issue.id,
        "tables": list(issue.tables),
        "rows": list(issue.rows),
        "columns": list(issue.columns),
        "scope": issue.scope.value,
        "attribute": issue.attribute.value,
        "outcome": issue.outcome.value if issue.outcome is not None else None,
        "constraint": issue.constraint,
        "evidence": issue.evidence,
    }


def smell_record(finding: SmellFinding) -> dict[str, Any]:
    return {
        "table": finding.table,
        "column": finding.column,
        "kind": finding.kind.value,
        "rows": list(finding.rows),
        "evidence": finding.evidence,
        "score": round(finding.score, SCORE_DIGITS),
    }


def write_jsonl(records: Iterable[dict[str, Any]], stream: TextIO) -> int:
    """Write one JSON object per line. Returns the number written."""
    count = 0
    for record in records:
        stream.write(json.dumps(record, ensure_ascii=False) + "\n")
        count += 1
    return count


def findings_summary(issues: list[Issue], smells: list[SmellFinding]) -> str:
    """Human-readable count table for stderr."""
    rows = [
        {
            "kind": "issue",
            "attribute": i.attribute.value,
            "scope": i.scope.value,
            "outcome": i.outcome.value if i.outcome is not None else "-",
        }
        for i in issues
    ]
    rows += [
        {"kind": "smell", "attribute": s.kind.value, "scope": "-", "outcome": "none"}
        for s in smells
    ]
    if not rows:
        return "No findings."
    frame = pd.DataFrame(rows, columns=["kind", "attribute", "scope", "outcome"])
    counts = frame.groupby(["kind", "attribute", "scope", "outcome"], sort=True).size()
    table = counts.reset_index(name="count").to_string(index=False)
    return f"{table}\nTotal: {len(rows)} finding(s)"


def render_summary(result: CountMatrix | SummaryStats, fmt: str = "text") -> str:
    """Render a triage summary as an aligned table, CSV, or JSON-Lines."""
    frame = result.frame
    if fmt == "csv":
        return frame.to_csv(lineterminator="\n")
    if fmt == "jsonl":
        records = frame.reset_index().to_dict(orient="records")
        return "".join(json.dumps(_plain(r), ensure_ascii=False) + "\n" for r in records)
    return frame.to_string(float_format=lambda v: f"{v:.2f}") + "\n"


def _plain(record: dict) -> dict:
    """numpy scalars -> Python scalars for json."""
    return {str(k): v.item() if hasattr(v, "item") else v for k, v in record.items()}
