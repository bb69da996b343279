"""SQLAlchemy models for the run ledger."""

from datetime import datetime
from typing import Optional

from sqlalchemy import DateTime, String
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column


class Base(DeclarativeBase):
    pass


class RunRecordDB(Base):
    """One executed command; the report itself stays on disk."""

    __tablename__ = "runs"

    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    command: Mapped[str] = mapped_column(String(50), index=True)
    config_hash: Mapped[str] = mapped_column(String(64), index=True)
    passed: Mapped[bool]
    report_path: Mapped[Optional[str]] = mapped_column(String(500))
    created_at: Mapped[datetime] = mapped_column(DateTime, index=True)
