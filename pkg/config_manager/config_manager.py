"""Configuration manager for reproducible experiments."""

import json
import logging
import os
import zlib
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from dotenv import load_dotenv

from iet_core import ArithmeticMode, Iet3, RotationRep, parse_alpha_cf

MODES = ("rational", "f64", "f64x")
METRICS = ("interval", "circle")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass
class ExperimentConfig:
    """
    Configuration data class containing all experiment settings.

    Attributes:
        lengths: IET lengths as a comma-separated string of three decimals
        alpha: Rotation number, as a decimal string
        kappa: Slit length, as a decimal string
        alpha_cf: "golden" or partial quotients "2,3,80,500" with a golden tail
        seed: Root seed of every random stream
        mode: Arithmetic mode name
        eps: Switch closeness target
        levels: Schedule levels
        samples: Verification samples per switch
        n_atoms: Atoms per sampled joining
        bins: Disintegration bins
        delta: Acceptance radius of the renormalization search
        t_max: Search horizon
        kr_grid: Quantization grid for large KR solves
        kr_exact_limit: Largest atom count solved exactly
        ground_metric: "interval" or "circle"
        section_tol: Tolerance of the section test
        out_dir: Directory of reports and data files
        database_url: Run ledger URL; empty disables the ledger
        log_level: Logging level
        log_file: Optional log file
    """

    lengths: Optional[str] = None
    alpha: Optional[str] = None
    kappa: Optional[str] = None
    alpha_cf: Optional[str] = None
    seed: int = 7
    mode: str = "f64"
    eps: float = 0.05
    levels: int = 1
    samples: int = 10_000
    n_atoms: int = 100_000
    bins: int = 128
    delta: float = 0.1
    t_max: float = 8.0
    kr_grid: int = 64
    kr_exact_limit: int = 2000
    ground_metric: str = "interval"
    section_tol: float = 1e-9
    out_dir: str = "out"
    database_url: str = ""
    log_level: str = "INFO"
    log_file: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Experiment fields only; logging and storage settings are left out."""
        data = asdict(self)
        for key in ("out_dir", "database_url", "log_level", "log_file"):
            data.pop(key)
        return dict(sorted(data.items()))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def arithmetic_mode(self) -> ArithmeticMode:
        return ArithmeticMode.from_name(self.mode)


_INT_FIELDS = (
    "seed",
    "levels",
    "samples",
    "n_atoms",
    "bins",
    "kr_grid",
    "kr_exact_limit",
)
_FLOAT_FIELDS = ("eps", "delta", "t_max", "section_tol")


class ConfigManager:
    """
    Manages configuration loading and access.

    Loads a .env file, then reads IETJ_* environment variables with defaults.
    """

    ENV_PREFIX = "IETJ_"

    def __init__(self, env_file: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            env_file: Path to .env file (optional)
        """
        self.logger = logging.getLogger(__name__)
        self._config: Optional[ExperimentConfig] = None

        if env_file and Path(env_file).exists():
            load_dotenv(env_file)
        else:
            load_dotenv()

        self.load_config()

    def _env(self, key: str, default: Optional[str] = None) -> Optional[str]:
        value = os.getenv(self.ENV_PREFIX + key.upper())
        return default if value is None or value == "" else value

    def load_config(self) -> None:
        """Load configuration from environment variables."""
        defaults = ExperimentConfig()
        try:
            self._config = ExperimentConfig(
                lengths=self._env("lengths"),
                alpha=self._env("alpha"),
                kappa=self._env("kappa"),
                alpha_cf=self._env("alpha_cf"),
                seed=int(self._env("seed", str(defaults.seed))),
                mode=self._env("mode", defaults.mode),
                eps=float(self._env("eps", str(defaults.eps))),
                levels=int(self._env("levels", str(defaults.levels))),
                samples=int(self._env("samples", str(defaults.samples))),
                n_atoms=int(self._env("n_atoms", str(defaults.n_atoms))),
                bins=int(self._env("bins", str(defaults.bins))),
                delta=float(self._env("delta", str(defaults.delta))),
                t_max=float(self._env("t_max", str(defaults.t_max))),
                kr_grid=int(self._env("kr_grid", str(defaults.kr_grid))),
                kr_exact_limit=int(
                    self._env("kr_exact_limit", str(defaults.kr_exact_limit))
                ),
                ground_metric=self._env("ground_metric", defaults.ground_metric),
                section_tol=float(self._env("section_tol", str(defaults.section_tol))),
                out_dir=self._env("out_dir", defaults.out_dir),
                database_url=self._env("database_url", defaults.database_url),
                log_level=self._env("log_level", defaults.log_level),
                log_file=self._env("log_file"),
            )
            self._validate_config()
            self.logger.debug("Configuration loaded successfully")
        except ValueError as e:
            self.logger.error(f"Error loading configuration: {e}")
            raise

    def _validate_config(self) -> None:
        """Validate configuration values."""
        if not self._config:
            raise ValueError("Configuration not loaded")
        c = self._config

        if c.eps <= 0:
            raise ValueError("eps must be positive")
        if c.levels < 0:
            raise ValueError("levels must be non-negative")
        if c.samples < 0:
            raise ValueError("samples must be non-negative")
        if c.n_atoms < 1:
            raise ValueError("n_atoms must be positive")
        if c.bins < 1:
            raise ValueError("bins must be at least 1")
        if c.delta <= 0 or c.t_max <= 0:
            raise ValueError("delta and t_max must be positive")
        if c.kr_grid < 1 or c.kr_exact_limit < 1:
            raise ValueError("KR grid and exact limit must be positive")
        if c.mode not in MODES:
            raise ValueError(
                f"Unknown arithmetic mode {c.mode!r}; expected one of {MODES}"
            )
        if c.ground_metric not in METRICS:
            raise ValueError(f"Unknown ground metric {c.ground_metric!r}")
        if not 0 <= c.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if c.log_level.upper() not in LOG_LEVELS:
            raise ValueError(f"Unknown log level {c.log_level!r}")

    @property
    def config(self) -> ExperimentConfig:
        """
        Get the current configuration.

        Raises:
            RuntimeError: If configuration is not loaded
        """
        if not self._config:
            raise RuntimeError("Configuration not loaded")
        return self._config

    def update_config(self, **kwargs) -> None:
        """
        Update configuration values at runtime.

        None values are skipped, so parsed command-line flags can be passed as is.

        Args:
            **kwargs: Configuration values to update
        """
        if not self._config:
            raise RuntimeError("Configuration not loaded")

        for key, value in kwargs.items():
            if value is None:
                continue
            if hasattr(self._config, key):
                if key in _INT_FIELDS:
                    value = int(value)
                elif key in _FLOAT_FIELDS:
                    value = float(value)
                setattr(self._config, key, value)
                self.logger.debug(f"Updated config: {key} = {value}")
            else:
                self.logger.warning(f"Unknown config key: {key}")

        self._validate_config()

    def save_config(self, filepath: str) -> None:
        """
        Save current configuration to a JSON file.

        Args:
            filepath: Path to save configuration file
        """
        Path(filepath).parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(asdict(self.config), f, indent=2, sort_keys=True)
        self.logger.info(f"Configuration saved to {filepath}")

    def load_config_from_file(self, filepath: str) -> None:
        """
        Load configuration from a JSON file.

        Args:
            filepath: Path to configuration file
        """
        with open(filepath, "r", encoding="utf-8") as f:
            config_dict = json.load(f)
        self.update_config(**config_dict)
        self.logger.info(f"Configuration loaded from {filepath}")


def build_iet(config: ExperimentConfig) -> Iet3:
    """
    The exchange described by a configuration.

    Exactly one source is accepted: lengths, or a rotation number (alpha or
    alpha_cf) together with kappa.

    Raises:
        ValueError: When no source or more than one is given
    """
    mode = config.arithmetic_mode()
    has_rotation = config.alpha is not None or config.alpha_cf is not None
    if config.alpha is not None and config.alpha_cf is not None:
        raise ValueError("Give alpha or alpha_cf, not both")
    if config.lengths is not None and has_rotation:
        raise ValueError("Give lengths or a rotation, not both")
    if config.lengths is not None:
        parts = [p.strip() for p in config.lengths.split(",") if p.strip()]
        return Iet3.from_lengths(parts, mode)
    if has_rotation:
        if config.kappa is None:
            raise ValueError("A rotation needs kappa")
        if config.alpha_cf is not None:
            alpha: Any = parse_alpha_cf(config.alpha_cf)
        else:
            alpha = config.alpha
        with mode.context():
            rep = RotationRep(mode.coerce(alpha), mode.coerce(config.kappa))
        return Iet3.from_rotation(rep, mode)
    raise ValueError("No IET given: set lengths, or alpha/alpha_cf with kappa")


class SeedBank:
    """
    Deterministic generators for named sub-tasks of one experiment.

    Each name maps to its own child of the root SeedSequence, so the order in which
    tasks ask for generators never changes their streams.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)

    def rng(self, name: str) -> np.random.Generator:
        key = zlib.crc32(name.encode("utf-8"))
        return np.random.default_rng(np.random.SeedSequence([self.seed, key]))
