"""Deterministic verification reports shared by every command."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import json

from kltbench.rational import fmt

STATUSES = ("pass", "fail", "skip")


def render(value) -> str:
    """Text form used in reports; a Fraction is always ``p/q``, a count stays an integer."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (list, tuple)):
        return "(" + ",".join(render(v) for v in value) + ")"
    if isinstance(value, (set, frozenset)):
        return "{" + ",".join(sorted(render(v) for v in value)) + "}"
    if value is None:
        return "-"
    return str(value)


@dataclass
class Check:
    id: str
    inputs: str
    expected: str
    actual: str
    status: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "inputs": self.inputs,
            "expected": self.expected,
            "actual": self.actual,
            "status": self.status,
        }


@dataclass
class Report:
    command: str
    checks: list[Check] = field(default_factory=list)

    def add(self, id: str, inputs, expected, actual, status: str | None = None) -> Check:
        """Record a check.  Without an explicit status, pass iff expected == actual."""
        if status is None:
            status = "pass" if expected == actual else "fail"
        if status not in STATUSES:
            raise ValueError(f"bad status {status!r}")
        inputs = inputs if isinstance(inputs, str) else render(inputs)
        check = Check(id, inputs, render(expected), render(actual), status)
        self.checks.append(check)
        return check

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def summary(self) -> dict[str, int]:
        counts = {s: 0 for s in STATUSES}
        for c in self.checks:
            counts[c.status] += 1
        counts["total"] = len(self.checks)
        return counts

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self) -> dict:
        from kltbench import __version__

        return {
            "version": __version__,
            "command": self.command,
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        from kltbench import __version__

        lines = [f"kltbench {__version__}: {self.command}"]
        for c in self.checks:
            line = f"{c.status.upper():4} {c.id} [{c.inputs}] actual={c.actual}"
            if c.expected != "-":
                line += f" expected={c.expected}"
            lines.append(line)
        s = self.summary
        lines.append(f"{s['pass']} pass, {s['fail']} fail, {s['skip']} skip ({s['total']} checks)")
        return "\n".join(lines)
