"""Structured run reports: one document per command or experiment.

Reports carry every parameter (seeds included) needed to reproduce a run.
The machine format is canonical JSON with all integers rendered as decimal
strings (labeled counts overflow 64-bit at small n already); two runs with
the same arguments produce byte-identical machine output except for the
timing field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

TOOL_VERSION = "0.1.0"

PASS = "pass"
FAIL = "fail"
OBSERVE = "observe"


@dataclass
class Verdict:
    name: str
    status: str
    detail: str = ""


@dataclass
class RunReport:
    command: str
    parameters: dict
    verdicts: list[Verdict] = field(default_factory=list)
    tables: dict[str, list[tuple[str, str]]] = field(default_factory=dict)
    tool_version: str = TOOL_VERSION
    timing_seconds: float | None = None

    def add_verdict(self, name: str, ok: bool | None, detail: str = ""):
        """ok=None records an observational entry."""
        status = OBSERVE if ok is None else (PASS if ok else FAIL)
        self.verdicts.append(Verdict(name, status, detail))

    def add_table(self, section: str, rows):
        self.tables[section] = [(str(k), str(v)) for k, v in rows]

    @property
    def failed(self) -> bool:
        return any(v.status == FAIL for v in self.verdicts)

    def to_text(self) -> str:
        lines = [f"== {self.command} (trisys {self.tool_version}) =="]
        if self.parameters:
            params = " ".join(f"{k}={_plain(v)}" for k, v in sorted(self.parameters.items()))
            lines.append(f"parameters: {params}")
        for section, rows in self.tables.items():
            lines.append(f"-- {section} --")
            width = max((len(k) for k, _ in rows), default=0)
            for k, v in rows:
                lines.append(f"  {k:<{width}}  {v}")
        for v in self.verdicts:
            tag = {"pass": "PASS", "fail": "FAIL", "observe": "OBS "}[v.status]
            detail = f"  ({v.detail})" if v.detail else ""
            lines.append(f"[{tag}] {v.name}{detail}")
        if self.timing_seconds is not None:
            lines.append(f"timing: {self.timing_seconds:.3f}s")
        return "\n".join(lines) + "\n"

    def to_machine(self) -> str:
        doc = {
            "command": self.command,
            "parameters": _jsonable(self.parameters),
            "tables": {
                sec: [[k, v] for k, v in rows] for sec, rows in self.tables.items()
            },
            "verdicts": [
                {"name": v.name, "status": v.status, "detail": v.detail}
                for v in self.verdicts
            ],
            "tool_version": self.tool_version,
            "timing_seconds": self.timing_seconds,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def parse_machine(text: str) -> dict:
        return json.loads(text)


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def _jsonable(value):
    """JSON-safe copy with exact integers as decimal strings."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
