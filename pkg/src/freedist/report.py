"""Small result container shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Report:
    """Outcome of a structured check: named sub-checks plus witnesses."""

    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    data: dict[str, Any] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)

    def record(self, key: str, ok: bool, witness: Any = None) -> bool:
        self.checks[key] = bool(ok)
        if not ok and witness is not None:
            self.witnesses[key] = witness
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def __bool__(self) -> bool:
        return self.ok
