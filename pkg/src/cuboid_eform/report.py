"""Pass/fail ledger shared by the verification and reduction suites."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .polyring import Polynomial


@dataclass
class Check:
    name: str
    passed: bool
    witness: str | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def record(self, name: str, residue: Polynomial, **details) -> Check:
        """Add a check that passes iff ``residue`` is the zero polynomial."""
        passed = residue.is_zero()
        check = Check(name, passed, None if passed else str(residue), dict(details))
        self.checks.append(check)
        return check

    def add(self, check: Check) -> Check:
        if not check.passed and not check.witness:
            raise ValueError(f"failing check {check.name!r} needs a witness")
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport | Iterable[Check]") -> "VerificationReport":
        checks = other.checks if isinstance(other, VerificationReport) else other
        for c in checks:
            self.add(c)
        return self

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "passed": sum(c.passed for c in self.checks),
            "failed": sum(not c.passed for c in self.checks),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)
