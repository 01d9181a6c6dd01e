"""JSON verification reports and CSV plot data."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .checks import Check


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    runtime_ms: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": {k: float(v) for k, v in self.results.items()},
            "checks": [c.as_dict() for c in self.checks],
            "runtime_ms": int(self.runtime_ms),
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["command"], d["inputs"], d["results"],
                   [Check.from_dict(c) for c in d["checks"]], d["runtime_ms"])


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Plot data with a single header line."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if not isinstance(x, str) else x for x in row])
