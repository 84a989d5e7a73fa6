"""Deterministic report assembly and rendering (JSON and aligned text)."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

REPORT_VERSION = "1"


@dataclass
class Analysis:
    command: str
    inputs: dict
    result: dict
    warnings: list = field(default_factory=list)
    micros: int | None = None

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "warnings": list(self.warnings),
            "micros": self.micros,
        }


@dataclass
class Report:
    analyses: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    errors: int = 0

    def as_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "analyses": [a.as_dict() for a in self.analyses],
            "warnings": list(self.warnings),
        }


def to_json(report: Report) -> str:
    return json.dumps(report.as_dict(), separators=(",", ":"), ensure_ascii=False)


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [len(h) for h in headers]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]
    fmt = "  ".join("{:<%d}" % w for w in widths)
    out = [fmt.format(*headers).rstrip(), fmt.format(*("-" * w for w in widths))]
    out += [fmt.format(*r).rstrip() for r in rows]
    return out


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list):
        return ", ".join(_cell(x) for x in v) if v else "-"
    return str(v)


def to_text(report: Report) -> str:
    lines: list[str] = []
    for a in report.analyses:
        lines.append(f"== {a.command} ==")
        for k, v in a.inputs.items():
            lines.append(f"{k}: {_cell(v)}")
        rows = a.result.get("rows")
        if rows:
            headers = list(rows[0].keys())
            lines.extend(_table(headers, [[_cell(r.get(h)) for h in headers] for r in rows]))
        for k, v in a.result.items():
            if k != "rows":
                lines.append(f"{k}: {_cell(v)}")
        for w in a.warnings:
            lines.append(f"warning: {w}")
        if a.micros is not None:
            lines.append(f"time: {a.micros} us")
        lines.append("")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines).rstrip() + "\n"


def emit_report(report: Report, fmt: str = "json", destination: str | Path | None = None) -> None:
    """Write the report; destination None or "-" means stdout."""
    if fmt == "json":
        text = to_json(report) + "\n"
    elif fmt == "text":
        text = to_text(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        return
    Path(destination).write_text(text, encoding="utf-8")
