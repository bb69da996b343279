"""Logger management for ietjoinings."""

from .logger_manager import LoggerManager, LogTag

__all__ = ["LoggerManager", "LogTag"]
