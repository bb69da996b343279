"""Database manager for the optional run ledger."""

import logging
from contextlib import contextmanager
from datetime import datetime, timedelta
from typing import Iterator, List, Optional

from sqlalchemy import create_engine, delete, select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session, sessionmaker

from models import RunRecord

from .models import Base, RunRecordDB

logger = logging.getLogger(__name__)


def _row(record: RunRecord) -> RunRecordDB:
    return RunRecordDB(
        command=record.command,
        config_hash=record.config_hash,
        passed=record.passed,
        report_path=record.report_path,
        created_at=record.created_at,
    )


def _record(row: RunRecordDB) -> RunRecord:
    return RunRecord(
        command=row.command,
        config_hash=row.config_hash,
        passed=bool(row.passed),
        report_path=row.report_path,
        created_at=row.created_at,
        id=row.id,
    )


class DatabaseManager:
    """
    Stores one row per executed command.

    The ledger keeps the command, the hash of its configuration, the outcome and
    where the report was written. Runs sharing a config hash are reruns of the same
    experiment.
    """

    def __init__(self, database_url: str = "sqlite:///ietjoinings.db"):
        self.database_url = database_url
        sqlite = database_url.startswith("sqlite")
        self.engine = create_engine(
            database_url,
            connect_args={"check_same_thread": False} if sqlite else {},
            pool_pre_ping=True,
        )
        self.SessionLocal = sessionmaker(bind=self.engine, expire_on_commit=False)
        self.create_tables()

    def create_tables(self) -> None:
        try:
            Base.metadata.create_all(bind=self.engine)
        except SQLAlchemyError as e:
            logger.error(f"Cannot create ledger tables at {self.database_url}: {e}")
            raise

    @contextmanager
    def get_session(self) -> Iterator[Session]:
        """Session committed on success and rolled back on any error."""
        session = self.SessionLocal()
        try:
            yield session
            session.commit()
        except Exception as e:
            session.rollback()
            logger.error(f"Ledger transaction rolled back: {e}")
            raise
        finally:
            session.close()

    def save_run(self, record: RunRecord) -> int:
        """Insert a run and return its id; the id is also set on the record."""
        with self.get_session() as session:
            row = _row(record)
            session.add(row)
            session.flush()
            run_id = row.id
        record.id = run_id
        logger.debug(f"Ledger row {run_id}: {record.command}")
        return run_id

    def get_runs(
        self, command: Optional[str] = None, limit: int = 100
    ) -> List[RunRecord]:
        """
        Most recent runs first.

        Args:
            command: Only runs of this subcommand
            limit: Maximum number of rows
        """
        query = select(RunRecordDB)
        if command:
            query = query.where(RunRecordDB.command == command)
        query = query.order_by(
            RunRecordDB.created_at.desc(), RunRecordDB.id.desc()
        ).limit(limit)
        with self.get_session() as session:
            return [_record(row) for row in session.scalars(query)]

    def get_run(self, run_id: int) -> Optional[RunRecord]:
        with self.get_session() as session:
            row = session.get(RunRecordDB, run_id)
            return _record(row) if row is not None else None

    def cleanup_old_runs(self, days: int = 30) -> int:
        """Delete runs older than `days` and return how many went."""
        cutoff = datetime.utcnow() - timedelta(days=days)
        with self.get_session() as session:
            result = session.execute(
                delete(RunRecordDB).where(RunRecordDB.created_at < cutoff)
            )
            deleted = result.rowcount or 0
        logger.info(f"Removed {deleted} ledger rows older than {days} days")
        return deleted
