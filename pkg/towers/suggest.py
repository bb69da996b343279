"""Candidate rigid towers read off the renormalization geometry."""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

from iet_core import Iet3, Interval, TowerError, denominators
from renorm import crossing_profile

from .tower import Tower, TowerStats, build_tower, tower_stats

logger = logging.getLogger(__name__)


@dataclass
class SuggestedTower:
    """
    A certified tower together with the scale it came from.

    Attributes:
        tower: The tower
        q: Rotation scale e^t whose crossing profile produced it
        t: ln q
        stats: Its rigidity statistics
    """

    tower: Tower
    q: int
    t: float
    stats: TowerStats

    @property
    def base(self) -> Interval:
        return self.tower.base

    @property
    def height(self) -> int:
        return self.tower.height

    def to_dict(self) -> dict:
        return {
            "base": list(self.tower.base.to_tuple()),
            "height": self.tower.height,
            "q": self.q,
            "t": self.t,
            "stats": self.stats.to_dict(),
        }


def _skyscrapers(iet: Iet3, q: int) -> List[Tower]:
    """First-return towers over the largest piece of each dominant count region."""
    profile = crossing_profile(iet, q)
    m = profile.dominant_count()
    towers: List[Tower] = []
    for count in (m, m + 1):
        pieces = profile.region(count)
        if count < 1 or not pieces:
            continue
        a, b = max(pieces, key=lambda ab: ab[1] - ab[0])
        with iet.mode.context():
            base = Interval(iet.mode.coerce(a), iet.mode.coerce(b))
        try:
            towers.append(build_tower(iet, base, count))
        except TowerError as e:
            logger.debug(f"q={q} count={count}: tower rejected at level {e.index}: {e}")
    return towers


def suggest_towers(
    iet: Iet3,
    k_max: int,
    q_max: int = 100000,
    extra_scales: Optional[Iterable[int]] = None,
) -> List[SuggestedTower]:
    """
    Certified towers at continued-fraction scales, most rigid first.

    At each scale q the crossing profile splits K into pieces on which T^c acts
    as a translation by the renormalized displacement; the tower over the largest
    such piece with c levels is a first-return skyscraper.

    Args:
        iet: The exchange
        k_max: Number of scales examined
        q_max: Largest scale
        extra_scales: Further scales, e.g. those of accepted renormalization times

    Returns:
        Towers sorted by rigidity, then by decreasing coverage
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    alpha, _ = iet.exact_rotation()
    scales = denominators(alpha, q_max)
    if extra_scales:
        scales = sorted(set(scales) | {q for q in extra_scales if 1 <= q <= q_max})
    suggestions: List[SuggestedTower] = []
    for q in scales[:k_max]:
        for tower in _skyscrapers(iet, q):
            stats = tower_stats(tower, iet)
            suggestions.append(SuggestedTower(tower, q, math.log(q), stats))
    suggestions.sort(key=lambda s: (s.stats.rigidity, -s.stats.coverage))
    used = min(len(scales), k_max)
    logger.info(f"{len(suggestions)} towers certified over {used} scales")
    return suggestions
