"""Run ledger for ietjoinings."""

from .database_manager import DatabaseManager
from .models import Base, RunRecordDB

__all__ = ["DatabaseManager", "Base", "RunRecordDB"]
