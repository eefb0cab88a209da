"""Render reports as CSV, markdown or JSON.

Every report starts with its provenance (config hash and input checksums):
a comment header for CSV and markdown, a ``meta`` object for JSON. Nothing
time-dependent is written, so identical inputs give identical bytes.
"""

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import pandas as pd

from .sections import get_header_lines

EXTENSIONS = {"csv": "csv", "markdown": "md", "json": "json"}


@dataclass
class Report:
    """A titled table with provenance."""

    name: str
    title: str
    columns: list[str]
    rows: list[list[str]]
    provenance: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _render_csv(report: Report) -> str:
    header = "".join(f"# {line}\n" for line in get_header_lines(report.provenance) + report.notes)
    buffer = io.StringIO()
    pd.DataFrame(report.rows, columns=report.columns, dtype=str).to_csv(buffer, index=False, lineterminator="\n")
    return header + buffer.getvalue()


def _render_markdown(report: Report) -> str:
    lines = ["<!--"] + get_header_lines(report.provenance) + ["-->", "", f"## {report.title}", ""]
    lines.append("| " + " | ".join(report.columns) + " |")
    lines.append("|" + "|".join("---" for _ in report.columns) + "|")
    for row in report.rows:
        lines.append("| " + " | ".join(row) + " |")
    if report.notes:
        lines += [""] + report.notes
    return "\n".join(lines) + "\n"


def _render_json(report: Report) -> str:
    document = {
        "meta": report.provenance,
        "name": report.name,
        "title": report.title,
        "columns": report.columns,
        "rows": [dict(zip(report.columns, row)) for row in report.rows],
    }
    if report.notes:
        document["notes"] = report.notes
    return json.dumps(document, indent=2) + "\n"


def render_report(report: Report, fmt: str = "csv") -> str:
    """Render a report in one of csv, markdown or json."""
    renderers = {"csv": _render_csv, "markdown": _render_markdown, "json": _render_json}
    if fmt not in renderers:
        raise ValueError(f"unknown report format {fmt!r}")
    return renderers[fmt](report)


def write_report(report: Report, out_dir: Path, fmt: str = "csv", stem: Optional[str] = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{stem or report.name}.{EXTENSIONS[fmt]}"
    path.write_text(render_report(report, fmt))
    return path
