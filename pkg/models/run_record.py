"""Ledger entry for one executed command."""

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional


def config_hash(config: dict) -> str:
    """SHA-256 of the sorted JSON form of a configuration."""
    payload = json.dumps(config, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


@dataclass
class RunRecord:
    """
    Represents one run stored in the ledger.

    Attributes:
        command: Subcommand name
        config_hash: Hash of the configuration that produced it
        passed: Whether every check of the report passed
        report_path: Where the JSON report was written
        created_at: When the run finished
        id: Database identifier, set once stored
    """

    command: str
    config_hash: str
    passed: bool
    report_path: Optional[str] = None
    created_at: datetime = field(default_factory=datetime.utcnow)
    id: Optional[int] = None

    def to_dict(self) -> dict:
        """Convert run record to dictionary."""
        return {
            "id": self.id,
            "command": self.command,
            "config_hash": self.config_hash,
            "passed": self.passed,
            "report_path": self.report_path,
            "created_at": self.created_at.isoformat(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        """Create RunRecord from dictionary."""
        return cls(
            command=data["command"],
            config_hash=data["config_hash"],
            passed=data["passed"],
            report_path=data.get("report_path"),
            created_at=datetime.fromisoformat(data["created_at"]),
            id=data.get("id"),
        )
