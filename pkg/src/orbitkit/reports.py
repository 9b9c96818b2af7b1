"""Check results as data.

Validators in this package return lists of Violation records (empty list =
valid) so callers can machine-read what failed and where.  The CLI wraps
them into Report objects for rendering and JSON output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    """One failed check.

    rule    -- stable identifier of the violated condition, named after what
               it checks (e.g. "identity-map", "composition", "cocycle").
    witness -- the offending data, stringified, in a fixed order.
    message -- human-readable description.
    """

    rule: str
    witness: tuple
    message: str

    def render(self) -> str:
        w = ", ".join(str(x) for x in self.witness)
        return f"[{self.rule}] {self.message}" + (f"  (witness: {w})" if self.witness else "")


@dataclass
class CheckRecord:
    name: str
    passed: bool
    violations: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def render(self) -> str:
        status = "ok" if self.passed else "FAIL"
        lines = [f"{status:4}  {self.name}"]
        for v in self.violations:
            lines.append("      " + (v.render() if isinstance(v, Violation) else str(v)))
        for k, val in sorted(self.info.items()):
            lines.append(f"      {k} = {val}")
        return "\n".join(lines)


@dataclass
class Report:
    records: list = field(default_factory=list)

    def add(self, name: str, violations, info=None) -> CheckRecord:
        rec = CheckRecord(name=name, passed=not violations,
                          violations=list(violations), info=dict(info or {}))
        self.records.append(rec)
        return rec

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.records)

    def render(self) -> str:
        return "\n".join(r.render() for r in self.records)

    def to_json(self) -> str:
        payload = [
            {
                "name": r.name,
                "passed": r.passed,
                "violations": [
                    {"rule": v.rule, "witness": [str(x) for x in v.witness], "message": v.message}
                    if isinstance(v, Violation) else {"message": str(v)}
                    for v in r.violations
                ],
                "info": {k: str(v) for k, v in r.info.items()},
            }
            for r in self.records
        ]
        return json.dumps(payload, indent=2, sort_keys=True)
