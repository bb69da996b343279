"""Rokhlin towers over intervals and their rigidity statistics."""

import csv
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np

from iet_core import (
    Iet3,
    Interval,
    IntervalSet,
    TowerLevelSplitError,
    TowerOverlapError,
    transport,
    transport_interval,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tower:
    """
    Disjoint intervals I, TI, ..., T^{n-1} I.

    Attributes:
        base: The base interval I
        height: Number of levels n
        level_images: The levels T^i I, i = 0..n-1
    """

    base: Interval
    height: int
    level_images: Tuple[Interval, ...]

    @property
    def width(self) -> float:
        return float(self.base.b) - float(self.base.a)

    @property
    def top(self) -> Interval:
        return self.level_images[-1]

    def level_set(self) -> IntervalSet:
        return IntervalSet(self.level_images)

    def level_of(self, x: float) -> int:
        """Index of the level containing x, or -1."""
        for i, level in enumerate(self.level_images):
            if level.contains(x):
                return i
        return -1

    def to_dict(self) -> dict:
        return {"base": list(self.base.to_tuple()), "height": self.height}


@dataclass
class TowerStats:
    """
    Measures of a tower and of its controllable sub-towers.

    Attributes:
        coverage: Measure of the union of the levels
        rigidity: lambda(T^n I symmetric-difference I) / lambda(I)
        hat_measure: Measure of the tower over I cap T^n I cap T^-n I
        tilde_measure: Measure of the tower over the base further cut by T^{+-2n} I
    """

    coverage: float
    rigidity: float
    hat_measure: float
    tilde_measure: float

    def to_dict(self) -> dict:
        return asdict(self)


def build_tower(iet: Iet3, base: Interval, height: int) -> Tower:
    """
    Transport the base level by level and certify the tower.

    Args:
        iet: The exchange
        base: Interval I inside [0,1)
        height: Number of levels n >= 1

    Returns:
        The certified tower

    Raises:
        ValueError: On an empty base or non-positive height
        TowerLevelSplitError: If a discontinuity of T lies inside a level below the top
        TowerOverlapError: If two levels intersect
    """
    if height < 1:
        raise ValueError(f"Tower height must be positive, got {height}")
    if base.is_empty or base.a < 0 or base.b > 1:
        raise ValueError(f"Tower base must be a non-empty subinterval of [0,1): {base}")
    levels: List[Interval] = [base]
    current = base
    for i in range(height - 1):
        pieces = transport_interval(iet, current)
        if len(pieces) != 1:
            raise TowerLevelSplitError(f"Discontinuity inside level {i}", i)
        current = pieces[0]
        levels.append(current)

    order = sorted(range(height), key=lambda k: levels[k].a)
    tol = iet.mode.tolerance
    for prev, nxt in zip(order[:-1], order[1:]):
        if levels[prev].b - levels[nxt].a > tol:
            raise TowerOverlapError(f"Levels {prev} and {nxt} overlap", max(prev, nxt))
    return Tower(base, height, tuple(levels))


def levels_disjoint(tower: Tower, tol: float = 1e-12) -> bool:
    """Endpoint-sort check of pairwise disjointness."""
    endpoints = sorted((float(iv.a), float(iv.b)) for iv in tower.level_images)
    return all(b - a2 <= tol for (_, b), (a2, _) in zip(endpoints[:-1], endpoints[1:]))


def tower_stats(tower: Tower, iet: Iet3) -> TowerStats:
    """
    Coverage, rigidity and the sub-tower measures of a certified tower.

    Args:
        tower: Tower produced by build_tower for this iet
        iet: The exchange

    Returns:
        TowerStats computed by exact interval transport
    """
    n = tower.height
    base = IntervalSet([tower.base], iet.mode.tolerance)
    forward = IntervalSet(transport_interval(iet, tower.top), iet.mode.tolerance)
    backward = transport(iet, base, -n)
    rigidity = base.symmetric_difference_measure(forward) / tower.width

    hat_base = base.intersection(forward).intersection(backward)
    tilde_base = hat_base.intersection(transport(iet, forward, n)).intersection(
        transport(iet, backward, -n)
    )
    stats = TowerStats(
        coverage=tower.level_set().measure,
        rigidity=rigidity,
        hat_measure=n * hat_base.measure,
        tilde_measure=n * tilde_base.measure,
    )
    logger.debug(f"Tower over {tower.base} height {n}: {stats}")
    return stats


def subtower_levels(iet: Iet3, base: IntervalSet, height: int) -> List[IntervalSet]:
    """Levels T^i B, i < height, of the tower over a union of intervals B."""
    levels = [base]
    for _ in range(height - 1):
        levels.append(transport(iet, levels[-1], 1))
    return levels


def hat_base(tower: Tower, iet: Iet3) -> IntervalSet:
    """I cap T^n I cap T^-n I."""
    base = IntervalSet([tower.base], iet.mode.tolerance)
    forward = IntervalSet(transport_interval(iet, tower.top), iet.mode.tolerance)
    return base.intersection(forward).intersection(transport(iet, base, -tower.height))


def levels_to_csv(tower: Tower, path: str) -> None:
    """Write the level endpoints as "a,b" rows."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["a", "b"])
        for level in tower.level_images:
            writer.writerow([f"{float(level.a):.17g}", f"{float(level.b):.17g}"])


def level_indices(tower: Tower, xs: np.ndarray) -> np.ndarray:
    """Vectorized level_of: index of the level holding each point, -1 outside."""
    starts = np.array([float(iv.a) for iv in tower.level_images])
    ends = np.array([float(iv.b) for iv in tower.level_images])
    order = np.argsort(starts)
    pos = np.searchsorted(starts[order], xs, side="right") - 1
    pos = np.clip(pos, 0, len(order) - 1)
    candidate = order[pos]
    inside = (xs >= starts[candidate]) & (xs < ends[candidate])
    return np.where(inside, candidate, -1)
