"""Pass/fail reports with exact values, rendered as text or JSON records."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact_arithmetic import decimal_approx, format_rational

SCHEMA = "sumset-density/1"
# text output abbreviates rationals whose denominator is longer than this
TEXT_DIGITS = 40


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    values: dict[str, Any] = field(default_factory=dict)


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    values: dict[str, Any] = field(default_factory=dict)
    rows: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, detail: str = "", **values) -> bool:
        self.checks.append(Check(name, bool(passed), detail, values))
        return bool(passed)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.values))

    # -- rendering ----------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"== {self.title}"]
        for key, value in self.values.items():
            lines.append(f"  {key} = {_text_value(value)}")
        if self.rows:
            keys = list(self.rows[0])
            lines.append("  " + " | ".join(keys))
            for row in self.rows:
                lines.append("  " + " | ".join(_text_value(row.get(k)) for k in keys))
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            extra = f" ({c.detail})" if c.detail else ""
            lines.append(f"  [{status}] {c.name}{extra}")
        lines.append(f"  result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_records(self) -> list[str]:
        out = [_dump({"schema": SCHEMA, "type": "report", "title": self.title,
                      "values": _record_value(self.values)})]
        for row in self.rows:
            out.append(_dump({"schema": SCHEMA, "type": "row", "title": self.title,
                              "row": _record_value(row)}))
        for c in self.checks:
            out.append(_dump({"schema": SCHEMA, "type": "check", "title": self.title,
                              "name": c.name, "passed": c.passed, "detail": c.detail,
                              "values": _record_value(c.values)}))
        out.append(_dump({"schema": SCHEMA, "type": "summary", "title": self.title,
                          "passed": self.passed}))
        return out


def _text_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        if len(str(value.denominator)) > TEXT_DIGITS:
            digits = len(str(value.denominator))
            return f"~{decimal_approx(value)} (exact p/q with {digits}-digit q in records)"
        return f"{format_rational(value)} (~{decimal_approx(value)})"
    if isinstance(value, tuple) and value and all(isinstance(v, Fraction) for v in value):
        return "[" + ", ".join(_text_value(v) for v in value) + "]"
    return str(value)


def _record_value(value):
    """Exact JSON-safe form: every number, integers included, as a "p/q" string."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (Fraction, int)):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): _record_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_record_value(v) for v in value]
    return str(value)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=False, ensure_ascii=False, separators=(",", ":"))
