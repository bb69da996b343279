"""Configuration management for ietjoinings."""

from .config_manager import ConfigManager, ExperimentConfig, SeedBank, build_iet

__all__ = ["ConfigManager", "ExperimentConfig", "SeedBank", "build_iet"]
