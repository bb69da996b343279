"""Rokhlin towers of 3-IETs."""

from .suggest import SuggestedTower, suggest_towers
from .tower import (
    Tower,
    TowerStats,
    build_tower,
    hat_base,
    level_indices,
    levels_disjoint,
    levels_to_csv,
    subtower_levels,
    tower_stats,
)

__all__ = [
    "SuggestedTower",
    "suggest_towers",
    "Tower",
    "TowerStats",
    "build_tower",
    "hat_base",
    "level_indices",
    "levels_disjoint",
    "levels_to_csv",
    "subtower_levels",
    "tower_stats",
]
