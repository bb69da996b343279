"""Uniform samples from unions of intervals."""

from typing import Sequence

import numpy as np

from iet_core import Interval, IntervalSet


def sample_interval_set(
    pieces: IntervalSet, k: int, rng: np.random.Generator
) -> np.ndarray:
    """k points uniform on the union (empty array for an empty set or k <= 0)."""
    return sample_intervals(list(pieces), k, rng)


def sample_intervals(
    pieces: Sequence[Interval], k: int, rng: np.random.Generator
) -> np.ndarray:
    """k points uniform on a list of disjoint intervals, weighted by length."""
    lows = np.array([float(iv.a) for iv in pieces])
    highs = np.array([float(iv.b) for iv in pieces])
    lengths = np.maximum(highs - lows, 0.0)
    if k <= 0 or lengths.sum() <= 0:
        return np.empty(0)
    which = rng.choice(len(pieces), size=k, p=lengths / lengths.sum())
    points = lows[which] + rng.random(k) * lengths[which]
    return np.minimum(points, np.nextafter(highs[which], lows[which]))
