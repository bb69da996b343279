"""Tests for the run ledger."""

from datetime import datetime, timedelta

import pytest

from database_manager import DatabaseManager
from models import RunRecord, config_hash


@pytest.fixture
def db(tmp_path):
    return DatabaseManager(f"sqlite:///{tmp_path / 'ledger.db'}")


def _record(command, passed=True, age_days=0):
    return RunRecord(
        command=command,
        config_hash=config_hash({"command": command}),
        passed=passed,
        report_path=f"out/{command}.json",
        created_at=datetime.utcnow() - timedelta(days=age_days),
    )


def test_save_and_get_run(db):
    """Test storing a run and reading it back by id."""
    # Create
    record = _record("tower", passed=False)
    run_id = db.save_run(record)
    stored = db.get_run(run_id)

    # Verify
    assert record.id == run_id
    assert stored is not None
    assert stored.command == "tower"
    assert stored.passed is False
    assert stored.config_hash == record.config_hash
    assert db.get_run(run_id + 100) is None


def test_get_runs_newest_first(db):
    """Test ordering, filtering and the limit."""
    # Create
    db.save_run(_record("kr", age_days=2))
    db.save_run(_record("tower", age_days=1))
    db.save_run(_record("kr"))

    # Verify
    runs = db.get_runs()
    assert [r.command for r in runs] == ["kr", "tower", "kr"]
    assert len(db.get_runs(command="kr")) == 2
    assert len(db.get_runs(limit=1)) == 1


def test_cleanup_old_runs(db):
    """Test that only runs past the cutoff are removed."""
    # Create
    db.save_run(_record("kr", age_days=40))
    db.save_run(_record("kr"))
    deleted = db.cleanup_old_runs(days=30)

    # Verify
    assert deleted == 1
    assert len(db.get_runs()) == 1
