"""Deterministic JSON reports."""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from decimal import Decimal
from typing import Any, Dict, List

import numpy as np

from .check_result import CheckResult

TOOL_VERSION = "0.1.0"


def normalize(value: Any) -> Any:
    """Plain JSON types; floats rounded to 17 significant digits, NaN/inf as None."""
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    if isinstance(value, np.ndarray):
        return [normalize(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction, Decimal)):
        x = float(value)
        return float(f"{x:.17g}") if math.isfinite(x) else None
    if hasattr(value, "to_dict"):
        return normalize(value.to_dict())
    return value


@dataclass
class Report:
    """
    Result of one command, embedded configuration and per-check margins.

    Attributes:
        command: Subcommand that produced the report
        config: Experiment configuration as a dictionary
        checks: Verified inequalities
        data: Command-specific payload
        version: Tool version
    """

    command: str
    config: Dict[str, Any]
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    version: str = TOOL_VERSION

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        """Convert report to dictionary."""
        return {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
        }

    def to_json(self) -> str:
        return json.dumps(normalize(self.to_dict()), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        """Create Report from dictionary."""
        return cls(
            command=data["command"],
            config=data.get("config", {}),
            checks=[CheckResult.from_dict(c) for c in data.get("checks", [])],
            data=data.get("data", {}),
            version=data.get("version", TOOL_VERSION),
        )
