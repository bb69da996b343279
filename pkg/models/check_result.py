"""Outcome of one verified inequality."""

from dataclasses import dataclass
from typing import Optional


@dataclass
class CheckResult:
    """
    A named inequality checked on computed data.

    Attributes:
        name: Stable identifier of the check
        passed: Whether the inequality holds
        value: Measured quantity
        bound: Threshold it was compared against
        margin: Signed slack, positive when the check passes
        detail: Free-text note (failing inequality, sample counts)
    """

    name: str
    passed: bool
    value: Optional[float] = None
    bound: Optional[float] = None
    margin: Optional[float] = None
    detail: str = ""

    @classmethod
    def at_most(
        cls, name: str, value: float, bound: float, detail: str = ""
    ) -> "CheckResult":
        """value <= bound."""
        value, bound = float(value), float(bound)
        return cls(name, value <= bound, value, bound, bound - value, detail)

    @classmethod
    def at_least(
        cls, name: str, value: float, bound: float, detail: str = ""
    ) -> "CheckResult":
        """value >= bound."""
        value, bound = float(value), float(bound)
        return cls(name, value >= bound, value, bound, value - bound, detail)

    @classmethod
    def vacuous(cls, name: str, detail: str = "nothing to check") -> "CheckResult":
        return cls(name, True, detail=detail)

    def to_dict(self) -> dict:
        """Convert check result to dictionary."""
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "bound": self.bound,
            "margin": self.margin,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckResult":
        """Create CheckResult from dictionary."""
        return cls(
            name=data["name"],
            passed=data["passed"],
            value=data.get("value"),
            bound=data.get("bound"),
            margin=data.get("margin"),
            detail=data.get("detail", ""),
        )
