"""Tests for configuration loading, validation and seeding."""

import json
from fractions import Fraction

import numpy as np
import pytest

from config_manager import ConfigManager, ExperimentConfig, SeedBank, build_iet
from iet_core import ArithmeticMode


def test_defaults(clean_env):
    """Test the built-in defaults."""
    # Create
    config = ConfigManager().config

    # Verify
    assert config.seed == 7
    assert config.mode == "f64"
    assert config.n_atoms == 100_000
    assert config.ground_metric == "interval"
    assert config.database_url == ""
    assert config.lengths is None


def test_environment_overrides(clean_env):
    """Test IETJ_* variables."""
    # Create
    clean_env.setenv("IETJ_SEED", "42")
    clean_env.setenv("IETJ_EPS", "0.01")
    clean_env.setenv("IETJ_LENGTHS", "0.2,0.3,0.5")
    config = ConfigManager().config

    # Verify
    assert config.seed == 42
    assert config.eps == 0.01
    assert config.lengths == "0.2,0.3,0.5"


@pytest.mark.parametrize(
    "key,value",
    [
        ("IETJ_EPS", "0"),
        ("IETJ_MODE", "quad"),
        ("IETJ_GROUND_METRIC", "sphere"),
        ("IETJ_BINS", "0"),
        ("IETJ_SEED", "-1"),
        ("IETJ_SAMPLES", "ten"),
        ("IETJ_LOG_LEVEL", "LOUD"),
    ],
)
def test_invalid_environment(clean_env, key, value):
    """Test that invalid values are rejected at load time."""
    clean_env.setenv(key, value)
    with pytest.raises(ValueError):
        ConfigManager()


def test_update_config_coerces_and_skips_none(clean_env):
    """Test flag-style updates."""
    # Create
    manager = ConfigManager()
    manager.update_config(seed="11", eps="0.2", alpha=None, unknown_key=3)

    # Verify
    assert manager.config.seed == 11
    assert manager.config.eps == 0.2
    assert manager.config.alpha is None
    with pytest.raises(ValueError):
        manager.update_config(levels=-1)


def test_save_and_load_file(clean_env, tmp_path):
    """Test the JSON configuration file."""
    # Create
    manager = ConfigManager()
    manager.update_config(seed=99, lengths="0.1,0.2,0.7")
    path = tmp_path / "config.json"
    manager.save_config(str(path))
    other = ConfigManager()
    other.load_config_from_file(str(path))

    # Verify
    assert json.loads(path.read_text(encoding="utf-8"))["seed"] == 99
    assert other.config.seed == 99
    assert other.config.lengths == "0.1,0.2,0.7"


def test_to_dict_leaves_out_storage_settings():
    """Test that only experiment fields enter the configuration hash."""
    data = ExperimentConfig(out_dir="elsewhere").to_dict()
    assert "out_dir" not in data
    assert "log_level" not in data
    assert list(data) == sorted(data)
    assert ExperimentConfig.from_dict({**data, "extra": 1}).seed == 7


class TestBuildIet:
    def test_from_lengths(self):
        """Test the lengths source in exact arithmetic."""
        iet = build_iet(ExperimentConfig(lengths="1/4, 1/4, 1/2", mode="rational"))
        assert iet.mode.tag == ArithmeticMode.rational().tag
        quarter = Fraction(1, 4)
        assert (iet.l1, iet.l2, iet.l3) == (quarter, quarter, Fraction(1, 2))

    def test_from_rotation(self):
        """Test alpha with kappa."""
        iet = build_iet(ExperimentConfig(alpha="0.6", kappa="0.8", mode="rational"))
        alpha, kappa = iet.exact_rotation()
        assert alpha == Fraction(3, 5)
        assert kappa == Fraction(4, 5)

    def test_from_partial_quotients(self):
        """Test the golden continued fraction source."""
        iet = build_iet(ExperimentConfig(alpha_cf="golden", kappa="0.7"))
        alpha, _ = iet.exact_rotation()
        assert float(alpha) == pytest.approx((5**0.5 - 1) / 2)

    @pytest.mark.parametrize(
        "config",
        [
            ExperimentConfig(),
            ExperimentConfig(lengths="0.2,0.3,0.5", alpha="0.5", kappa="0.7"),
            ExperimentConfig(alpha="0.5", alpha_cf="golden", kappa="0.7"),
            ExperimentConfig(alpha="0.5"),
        ],
    )
    def test_rejects_ambiguous_sources(self, config):
        """Test that exactly one source is required."""
        with pytest.raises(ValueError):
            build_iet(config)


def test_seed_bank_streams_are_named():
    """Test per-task determinism independent of request order."""
    # Create
    first = SeedBank(7)
    second = SeedBank(7)
    a1 = first.rng("orbit/sample").random(3)
    b1 = first.rng("kr/sample").random(3)
    b2 = second.rng("kr/sample").random(3)
    a2 = second.rng("orbit/sample").random(3)

    # Verify
    assert np.array_equal(a1, a2)
    assert np.array_equal(b1, b2)
    assert not np.array_equal(a1, b1)
    assert not np.array_equal(SeedBank(8).rng("kr/sample").random(3), b1)
