"""Tests for check results, reports and run records."""

import json
import math
from fractions import Fraction

import numpy as np

from models import CheckResult, Report, RunRecord, config_hash, normalize


class TestCheckResult:
    def test_margins(self):
        """Test the signed slack of both inequality directions."""
        low = CheckResult.at_most("kr", 0.03, 0.1)
        high = CheckResult.at_least("coverage", 0.5, 0.9)

        assert low.passed and math.isclose(low.margin, 0.07)
        assert not high.passed and math.isclose(high.margin, -0.4)

    def test_vacuous_passes(self):
        """Test checks with nothing to inspect."""
        check = CheckResult.vacuous("B_birkhoff", "needs level k+1")
        assert check.passed
        assert check.value is None
        assert check.detail == "needs level k+1"

    def test_dict_form(self):
        """Test that the dictionary form keeps every field."""
        check = CheckResult.at_most("tail", 1.0, 2.0, "values [1.0]")
        assert CheckResult.from_dict(check.to_dict()) == check


def test_normalize():
    """Test conversion to plain JSON types."""
    # Create
    data = normalize(
        {
            "f": Fraction(1, 3),
            "arr": np.array([1, 2]),
            "flag": np.bool_(True),
            "nan": float("nan"),
            3: np.float64(0.1),
        }
    )

    # Verify
    assert data == {"f": 1 / 3, "arr": [1, 2], "flag": True, "nan": None, "3": 0.1}
    assert type(data["arr"][0]) is int


class TestReport:
    def test_passed_and_failing(self):
        """Test the aggregated outcome."""
        report = Report(
            "tower",
            {"seed": 7},
            [CheckResult.at_least("coverage", 0.5, 0.9), CheckResult.vacuous("other")],
        )
        assert not report.passed
        assert [c.name for c in report.failing()] == ["coverage"]

    def test_json_is_deterministic(self):
        """Test sorted keys, indentation and the trailing newline."""
        # Create
        first = Report("kr", {"seed": 7, "bins": 128}, data={"kr": {"value": 0.1}})
        second = Report("kr", {"bins": 128, "seed": 7}, data={"kr": {"value": 0.1}})
        text = first.to_json()

        # Verify
        assert text == second.to_json()
        assert text.endswith("}\n")
        parsed = json.loads(text)
        assert list(parsed) == sorted(parsed)
        assert parsed["passed"] is True
        assert Report.from_dict(parsed).to_json() == text


def test_config_hash_ignores_key_order():
    """Test the SHA-256 configuration fingerprint."""
    digest = config_hash({"seed": 7, "eps": 0.05})
    assert digest == config_hash({"eps": 0.05, "seed": 7})
    assert len(digest) == 64
    assert digest != config_hash({"seed": 8, "eps": 0.05})


def test_run_record_dict_form():
    """Test the ledger entry's dictionary form."""
    record = RunRecord("kr", config_hash({"seed": 7}), True, "out/kr.json", id=3)
    restored = RunRecord.from_dict(record.to_dict())
    assert restored == record
