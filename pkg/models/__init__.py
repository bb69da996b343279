"""Report models for ietjoinings."""

from .check_result import CheckResult
from .report import TOOL_VERSION, Report, normalize
from .run_record import RunRecord, config_hash

__all__ = [
    "CheckResult",
    "Report",
    "RunRecord",
    "TOOL_VERSION",
    "config_hash",
    "normalize",
]
