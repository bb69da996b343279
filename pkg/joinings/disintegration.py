"""Disintegration of a joining along the first coordinate."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .measures import DiscreteMeasure2D
from .test_functions import TestFunction

logger = logging.getLogger(__name__)

DEFAULT_BINS = 128


@dataclass
class Disintegration:
    """
    Conditional measures of a joining on equal-width x-bins.

    Attributes:
        bins: Number of bins
        masses: Joint mass of each bin
        xs: Per bin, the x-coordinates of its atoms
        ys: Per bin, the y-coordinates of its atoms
        ws: Per bin, conditional weights summing to one (empty for empty bins)
    """

    bins: int
    masses: np.ndarray
    xs: List[np.ndarray]
    ys: List[np.ndarray]
    ws: List[np.ndarray]

    @property
    def empty(self) -> np.ndarray:
        return self.masses <= 0

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.bins) + 0.5) / self.bins

    def conditional(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.ys[index], self.ws[index]

    def representative_x(self) -> np.ndarray:
        """Mass-weighted mean x of each bin; the bin center when empty."""
        rep = self.centers.copy()
        for i in range(self.bins):
            if self.masses[i] > 0:
                rep[i] = float(np.dot(self.xs[i], self.ws[i]))
        return rep

    def reassemble_y_marginal(self) -> Tuple[np.ndarray, np.ndarray]:
        """Atoms and weights of sum over bins of mass * conditional."""
        ys = np.concatenate(self.ys)
        ws = np.concatenate([m * w for m, w in zip(self.masses, self.ws)])
        return ys, ws


def disintegrate(m: DiscreteMeasure2D, bins: int = DEFAULT_BINS) -> Disintegration:
    """
    Group atoms by x-bin and normalize each group.

    Args:
        m: The joint measure
        bins: Number of equal-width bins (>= 1)
    """
    if bins < 1:
        raise ValueError("Need at least one bin")
    index = np.minimum((m.xs * bins).astype(int), bins - 1)
    order = np.argsort(index, kind="stable")
    bounds = np.searchsorted(index[order], np.arange(bins + 1))
    masses = np.zeros(bins)
    xs, ys, ws = [], [], []
    for i in range(bins):
        sel = order[bounds[i] : bounds[i + 1]]
        mass = float(m.ws[sel].sum())
        masses[i] = mass
        xs.append(m.xs[sel])
        ys.append(m.ys[sel])
        ws.append(m.ws[sel] / mass if mass > 0 else m.ws[sel])
    return Disintegration(bins, masses, xs, ys, ws)


@dataclass
class FiberStats:
    """
    Support diameters of the conditional measures.

    Attributes:
        diameters: Per bin diameter (NaN for empty bins)
        threshold: Diameter threshold used for the summary
        fraction_above: Fraction of non-empty bins with diameter above threshold
        nonempty: Number of non-empty bins
    """

    diameters: np.ndarray
    threshold: float
    fraction_above: float
    nonempty: int

    def to_dict(self) -> dict:
        finite = self.diameters[np.isfinite(self.diameters)]
        return {
            "threshold": self.threshold,
            "fraction_above": self.fraction_above,
            "nonempty": self.nonempty,
            "median_diameter": float(np.median(finite)) if finite.size else 0.0,
        }


def fiber_diameter_stats(
    d: Disintegration, mass_floor: float = 0.0, threshold: Optional[float] = None
) -> FiberStats:
    """
    Diameter of each conditional support after dropping atoms of mass <= mass_floor.

    Args:
        d: The disintegration
        mass_floor: Conditional weight an atom must exceed to count
        threshold: Diameter threshold; 1/bins when omitted
    """
    threshold = 1.0 / d.bins if threshold is None else threshold
    diameters = np.full(d.bins, np.nan)
    for i in range(d.bins):
        if d.masses[i] <= 0:
            continue
        kept = d.ys[i][d.ws[i] > mass_floor]
        diameters[i] = float(kept.max() - kept.min()) if kept.size else 0.0
    finite = diameters[np.isfinite(diameters)]
    fraction = float(np.mean(finite > threshold)) if finite.size else 0.0
    return FiberStats(diameters, threshold, fraction, int(finite.size))


def apply_Asigma(d: Disintegration, f: TestFunction) -> np.ndarray:
    """Per-bin conditional expectation of f (NaN for empty bins)."""
    values = np.full(d.bins, np.nan)
    for i in range(d.bins):
        if d.masses[i] > 0:
            values[i] = float(np.dot(f(d.ys[i]), d.ws[i]))
    return values
