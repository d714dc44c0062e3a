"""JSON and Markdown rendering of verification reports."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path


def _stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def to_records(reports) -> list:
    """Plain dictionaries; report objects and already-loaded dicts both pass."""
    out = []
    for r in reports:
        d = r if isinstance(r, dict) else r.to_dict()
        if not d.get("timestamp"):
            d = {**d, "timestamp": _stamp()}
        out.append(d)
    return out


def to_json(reports) -> str:
    return json.dumps(to_records(reports), indent=2) + "\n"


def _e(x) -> str:
    return "-" if x is None else f"{x:.2e}"


def to_markdown(reports) -> str:
    lines = [
        "| id | label | digits | pass | fail | skipped | max rel err | median rel err | negative variant | result |",
        "|---|---|---|---|---|---|---|---|---|---|",
    ]
    for d in to_records(reports):
        agg = d["aggregate"]
        neg = d.get("negative_variant_result")
        if neg and neg["evaluated"]:
            negtext = f"fails {neg['failed']}/{neg['evaluated']}"
        else:
            negtext = "-"
        if d.get("error"):
            result = "ERROR"
        else:
            result = "PASS" if agg["passed"] else "FAIL"
        label = str(d.get("paper_label", "")).replace("|", "\\|")
        lines.append(
            f"| {d['id']} | {label} | {d['digits']} | {agg['pass_count']} | {agg['fail_count']} "
            f"| {agg['skipped_count']} | {_e(agg['max_rel_error'])} | {_e(agg['median_rel_error'])} "
            f"| {negtext} | {result} |"
        )
    return "\n".join(lines) + "\n"


def report_emit(reports, format: str = "json", path=None) -> str:
    """Render ``reports`` as ``json`` or ``markdown``; write to ``path`` if given."""
    if format == "json":
        text = to_json(reports)
    elif format == "markdown":
        text = to_markdown(reports)
    else:
        raise ValueError(f"unknown report format {format!r}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_reports(path) -> list:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return data if isinstance(data, list) else [data]
