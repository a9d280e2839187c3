from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class VerificationError(ValueError):
    """An operation that requires a verified object was handed one that fails."""

    def __init__(self, message: str, report: VerificationReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass
class VerificationReport:
    """Outcome of a definition-level check.

    ``checks`` maps each named condition to pass/fail; ``witnesses`` maps the
    same names to sorted lists of violations. Failures are data, never raised.
    """

    kind: str
    checks: dict[str, bool]
    witnesses: dict[str, list] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __bool__(self) -> bool:
        return self.ok

    def failed(self) -> list[str]:
        return [name for name, passed in self.checks.items() if not passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "ok": self.ok,
            "checks": dict(self.checks),
            "witnesses": {k: [_plain(w) for w in v] for k, v in self.witnesses.items()},
            "details": _plain(self.details),
        }

    def require(self, what: str) -> None:
        if not self.ok:
            raise VerificationError(
                f"{what} fails {self.kind} verification: {', '.join(self.failed())}",
                self,
            )


def _plain(obj: Any) -> Any:
    # JSON-safe copy: tuples become lists, dict keys become strings
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj
