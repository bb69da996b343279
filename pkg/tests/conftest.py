"""Pytest configuration and fixtures."""

from fractions import Fraction

import numpy as np
import pytest

from config_manager import ExperimentConfig
from iet_core import ArithmeticMode, Iet3, RotationRep, alpha_from_cf

# alpha = [0; 2, 3, 80, 500, 1, 1, ...], kappa = 963/1124
DOCUMENTED_CF = (2, 3, 80, 500)
DOCUMENTED_KAPPA = Fraction(963, 1124)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def periodic_iet():
    """Exact IET with lengths (1/4, 1/4, 1/2); T^4 is the identity."""
    return Iet3.from_lengths(["1/4", "1/4", "1/2"], ArithmeticMode.rational())


@pytest.fixture
def periodic_iet_f64():
    """The same exchange in binary64, where every value involved is exact."""
    return Iet3.from_lengths([0.25, 0.25, 0.5])


@pytest.fixture
def golden_iet():
    """alpha the golden mean, kappa = 1/1.3."""
    alpha = alpha_from_cf([])
    return Iet3.from_rotation(RotationRep(float(alpha), 1 / 1.3))


@pytest.fixture(scope="session")
def documented_iet():
    """The documented parameter preset in binary64."""
    alpha = alpha_from_cf(DOCUMENTED_CF)
    return Iet3.from_rotation(RotationRep(float(alpha), float(DOCUMENTED_KAPPA)))


@pytest.fixture
def experiment_config(tmp_path):
    """Small configuration writing into a temporary directory."""
    return ExperimentConfig(
        lengths="0.2,0.3,0.5",
        seed=7,
        samples=200,
        n_atoms=500,
        out_dir=str(tmp_path / "out"),
    )


@pytest.fixture
def clean_env(monkeypatch):
    """Remove IETJ_* variables so configuration defaults apply."""
    import os

    for key in list(os.environ):
        if key.startswith("IETJ_"):
            monkeypatch.delenv(key)
    return monkeypatch
