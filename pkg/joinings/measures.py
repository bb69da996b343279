"""Finitely supported measures on the unit square and the joinings sampled from T."""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from iet_core import Iet3, InvalidMeasureError

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-12
ORBIT_BLOCK = 1 << 20


@dataclass(frozen=True, eq=False)
class DiscreteMeasure2D:
    """
    Weighted atoms (x, y, w) on [0,1)^2 with total weight one.

    Attributes:
        xs: First coordinates
        ys: Second coordinates
        ws: Positive weights
    """

    xs: np.ndarray
    ys: np.ndarray
    ws: np.ndarray

    def __post_init__(self) -> None:
        xs, ys, ws = (np.asarray(v, dtype=float) for v in (self.xs, self.ys, self.ws))
        if not (xs.shape == ys.shape == ws.shape) or xs.ndim != 1 or xs.size == 0:
            raise InvalidMeasureError(
                "Atoms need matching non-empty 1-D coordinate arrays"
            )
        if np.any(ws <= 0):
            raise InvalidMeasureError("Atom weights must be positive")
        if abs(ws.sum() - 1.0) > max(WEIGHT_TOL, 4 * np.finfo(float).eps * ws.size):
            raise InvalidMeasureError(f"Total weight {ws.sum()!r} differs from 1")
        for name, v in (("x", xs), ("y", ys)):
            if np.any(v < 0) or np.any(v >= 1):
                raise InvalidMeasureError(f"{name}-coordinates must lie in [0,1)")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "ws", ws)

    @classmethod
    def uniform(cls, xs: np.ndarray, ys: np.ndarray) -> "DiscreteMeasure2D":
        n = len(xs)
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        return cls(xs, ys, np.full(n, 1.0 / n))

    @classmethod
    def mixture(
        cls, measures: Sequence["DiscreteMeasure2D"], weights: Sequence[float] = ()
    ) -> "DiscreteMeasure2D":
        """Convex combination; equal weights by default."""
        if not weights:
            weights = [1.0 / len(measures)] * len(measures)
        return cls(
            np.concatenate([m.xs for m in measures]),
            np.concatenate([m.ys for m in measures]),
            np.concatenate([w * m.ws for m, w in zip(measures, weights)]),
        )

    @property
    def n_atoms(self) -> int:
        return int(self.xs.size)

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.xs, self.ys])

    def to_csv(self, path: str) -> None:
        """Rows "x,y,w" with 17 significant digits."""
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["x", "y", "w"])
            for x, y, w in zip(self.xs, self.ys, self.ws):
                writer.writerow([f"{x:.17g}", f"{y:.17g}", f"{w:.17g}"])

    @classmethod
    def from_csv(cls, path: str) -> "DiscreteMeasure2D":
        """
        Read "x,y,w" rows; a header line is optional.

        Raises:
            InvalidMeasureError: On malformed rows or invalid atoms
        """
        rows = []
        with open(path, "r", encoding="utf-8") as f:
            for row in csv.reader(f):
                if not row or row[0].strip().lower() == "x":
                    continue
                try:
                    rows.append([float(v) for v in row[:3]])
                except ValueError as e:
                    raise InvalidMeasureError(f"Bad atom row {row} in {path}") from e
        if not rows:
            raise InvalidMeasureError(f"No atoms in {path}")
        data = np.array(rows)
        return cls(data[:, 0], data[:, 1], data[:, 2])

    def histogram(self, grid: int) -> np.ndarray:
        """Mass per cell of a grid x grid partition, indexed [x-cell, y-cell]."""
        hist, _, _ = np.histogram2d(
            self.xs, self.ys, bins=grid, range=[[0, 1], [0, 1]], weights=self.ws
        )
        return hist

    def histogram_to_csv(self, path: str, grid: int) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, self.histogram(grid), delimiter=",", fmt="%.17g")


def stratified_points(n: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform point in each of n equal bins of [0,1)."""
    pts = (np.arange(n) + rng.random(n)) / n
    return np.minimum(pts, np.nextafter(1.0, 0.0))


def sample_power_joining(
    iet: Iet3, a: int, n_atoms: int, rng: np.random.Generator
) -> DiscreteMeasure2D:
    """
    N equal atoms (x_i, T^a x_i) with stratified x_i.

    Args:
        iet: The exchange
        a: Power of T
        n_atoms: Number of atoms N >= 1
        rng: Seeded generator

    Returns:
        Empirical version of the joining carried by the graph of T^a
    """
    if n_atoms < 1:
        raise ValueError("Need at least one atom")
    xs = stratified_points(n_atoms, rng)
    return DiscreteMeasure2D.uniform(xs, iet.apply_array(xs, a))


def orbit_array(iet: Iet3, x: float, length: int) -> np.ndarray:
    """T^i x for i = 0..length-1 in binary64."""
    l1, l2, l3 = float(iet.l1), float(iet.l2), float(iet.l3)
    d1, d2 = l1, l1 + l2
    s1, s2, s3 = l2 + l3, l3 - l1, -(l1 + l2)
    top = np.nextafter(1.0, 0.0)
    out = np.empty(length)
    for i in range(length):
        out[i] = x
        x = x + (s1 if x < d1 else s2 if x < d2 else s3)
        x = min(max(x, 0.0), top)
    return out


def induced_orbit_blocks(
    iet: Iet3, x: float, length: int, block: int = ORBIT_BLOCK
) -> Iterator[np.ndarray]:
    """
    T^i x for i = 0..length-1, in consecutive blocks of `block` points.

    T is the first return of y -> y + alpha to [0, kappa), rescaled, so the orbit
    is read off the rotation orbit of kappa * x in vectorized chunks. The position
    error grows like i * 2^-53, which keeps windows of 10^9 steps usable for time
    averages.

    Args:
        iet: The exchange
        x: Start point
        length: Number of orbit points
        block: Points per yielded array (the last one may be shorter)
    """
    if block < 1:
        raise ValueError("Block size must be positive")
    alpha, kappa = (float(v) for v in iet.exact_rotation())
    top = np.nextafter(1.0, 0.0)
    y0 = kappa * float(x)
    chunk = int(block / kappa) + 64
    pending = np.empty(0)
    offset, emitted = 0, 0
    while emitted < length:
        size = min(block, length - emitted)
        while pending.size < size:
            steps = np.arange(offset, offset + chunk, dtype=float)
            ys = np.mod(y0 + steps * alpha, 1.0)
            pending = np.concatenate([pending, ys[ys < kappa] / kappa])
            offset += chunk
        yield np.minimum(pending[:size], top)
        pending = pending[size:]
        emitted += size


def empirical_orbit_joining(
    iet: Iet3, x: float, n: int, length: int
) -> DiscreteMeasure2D:
    """
    Atoms (T^i x, T^{i+n} x), i = 0..L-1, with equal weights.

    Args:
        iet: The exchange
        x: Start point
        n: Offset between coordinates
        length: Window length L >= 1
    """
    if length < 1:
        raise ValueError("Window length must be positive")
    x = float(iet.check_point(x))
    start = float(iet.apply_pow(n, x))
    return DiscreteMeasure2D.uniform(
        orbit_array(iet, x, length), orbit_array(iet, start, length)
    )
