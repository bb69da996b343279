"""Half-open intervals, finite unions of them, and their exact transport under T."""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np

from .arithmetic import Number
from .iet import Iet3

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Interval:
    """
    Half-open interval [a, b).

    Attributes:
        a: Left endpoint (included)
        b: Right endpoint (excluded)
    """

    a: Number
    b: Number

    @property
    def length(self) -> Number:
        return self.b - self.a if self.b > self.a else self.a - self.a

    @property
    def is_empty(self) -> bool:
        return not self.b > self.a

    def contains(self, x: Number) -> bool:
        return self.a <= x < self.b

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        a, b = max(self.a, other.a), min(self.b, other.b)
        return Interval(a, b) if b > a else None

    def to_tuple(self) -> Tuple[float, float]:
        return float(self.a), float(self.b)


class IntervalSet:
    """
    Finite disjoint union of half-open intervals, kept sorted.

    Pieces closer than ``tol`` are merged on construction.
    """

    def __init__(self, intervals: Iterable[Interval] = (), tol: float = 0.0):
        self.tol = tol
        pieces = sorted(
            (iv for iv in intervals if not iv.is_empty), key=lambda iv: iv.a
        )
        merged: List[Interval] = []
        for iv in pieces:
            if merged and iv.a - merged[-1].b <= tol:
                last = merged[-1]
                merged[-1] = Interval(last.a, max(last.b, iv.b))
            else:
                merged.append(iv)
        self.components: Tuple[Interval, ...] = tuple(merged)

    @classmethod
    def single(cls, a: Number, b: Number, tol: float = 0.0) -> "IntervalSet":
        return cls([Interval(a, b)], tol)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __repr__(self) -> str:
        body = ", ".join(
            f"[{float(iv.a):.6g}, {float(iv.b):.6g})" for iv in self.components
        )
        return f"IntervalSet({body})"

    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def measure(self) -> float:
        return float(sum(float(iv.b) - float(iv.a) for iv in self.components))

    def exact_measure(self) -> Number:
        total = None
        for iv in self.components:
            total = iv.length if total is None else total + iv.length
        return total if total is not None else 0

    def contains(self, x: Number) -> bool:
        return any(iv.contains(x) for iv in self.components)

    def contains_array(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized membership test in binary64."""
        xs = np.asarray(xs, dtype=float)
        if not self.components:
            return np.zeros(xs.shape, dtype=bool)
        starts = np.array([float(iv.a) for iv in self.components])
        ends = np.array([float(iv.b) for iv in self.components])
        idx = np.searchsorted(starts, xs, side="right") - 1
        ok = idx >= 0
        safe = np.where(ok, idx, 0)
        return ok & (xs < ends[safe])

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(list(self.components) + list(other.components), self.tol)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out: List[Interval] = []
        i = j = 0
        mine, theirs = self.components, other.components
        while i < len(mine) and j < len(theirs):
            piece = mine[i].intersect(theirs[j])
            if piece is not None:
                out.append(piece)
            if mine[i].b < theirs[j].b:
                i += 1
            else:
                j += 1
        return IntervalSet(out, self.tol)

    def complement(self, low: Number = 0, high: Number = 1) -> "IntervalSet":
        """[low, high) minus this set."""
        out: List[Interval] = []
        cursor = low
        for iv in self.components:
            if iv.a > cursor:
                out.append(Interval(cursor, min(iv.a, high)))
            cursor = max(cursor, iv.b)
        if cursor < high:
            out.append(Interval(cursor, high))
        return IntervalSet(out, self.tol)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        if self.is_empty:
            return self
        if not other.components:
            return self
        low = min(self.components[0].a, other.components[0].a)
        high = max(self.components[-1].b, other.components[-1].b)
        return self.intersection(other.complement(low, high))

    def symmetric_difference_measure(self, other: "IntervalSet") -> float:
        return self.difference(other).measure + other.difference(self).measure

    def erode(self, radius: Number) -> "IntervalSet":
        """Points whose radius-neighbourhood stays inside one component."""
        return IntervalSet(
            [Interval(iv.a + radius, iv.b - radius) for iv in self.components], self.tol
        )

    def largest(self) -> Optional[Interval]:
        if not self.components:
            return None
        return max(self.components, key=lambda iv: iv.b - iv.a)

    def to_list(self) -> List[Tuple[float, float]]:
        return [iv.to_tuple() for iv in self.components]


def transport_interval(iet: Iet3, interval: Interval) -> List[Interval]:
    """
    Exact image of [a, b) under T, split at the discontinuities inside it.

    Args:
        iet: The exchange
        interval: Subinterval of [0,1)

    Returns:
        The image pieces, one per branch met
    """
    cuts = [interval.a]
    for d in iet.discontinuities:
        if interval.a < d < interval.b:
            cuts.append(d)
    cuts.append(interval.b)
    pieces: List[Interval] = []
    with iet.mode.context():
        shifts = iet.shifts
        for left, right in zip(cuts[:-1], cuts[1:]):
            if not right > left:
                continue
            s = shifts[iet.branch(left)]
            lo, hi = left + s, right + s
            if lo < 0:
                lo = iet.mode.zero()
            if hi > 1:
                hi = iet.mode.one()
            pieces.append(Interval(lo, hi))
    return pieces


def transport(iet: Iet3, pieces: IntervalSet, n: int = 1) -> IntervalSet:
    """T^n of a union of intervals; negative n uses the inverse exchange."""
    if n < 0:
        return transport(iet.inverse(), pieces, -n)
    current = pieces
    for _ in range(n):
        images: List[Interval] = []
        for iv in current:
            images.extend(transport_interval(iet, iv))
        current = IntervalSet(images, iet.mode.tolerance)
    return current


def preimage_measure(iet: Iet3, a: Number, b: Number) -> float:
    """Lebesgue measure of T^{-1}[a, b)."""
    return transport(iet, IntervalSet.single(a, b), -1).measure


def min_return_time(iet: Iet3, target: Interval, n_max: int) -> Optional[int]:
    """
    Smallest n in [1, n_max] with T^n J meeting J, by exact transport.

    Args:
        iet: The exchange
        target: The interval J
        n_max: Search horizon

    Returns:
        The minimal return time, or None if J does not return within n_max
    """
    if target.is_empty:
        raise ValueError("Return time of an empty interval")
    base = IntervalSet([target], iet.mode.tolerance)
    current = base
    for n in range(1, n_max + 1):
        current = transport(iet, current, 1)
        if current.intersection(base).measure > iet.mode.tolerance:
            return n
    logger.debug(f"No return within {n_max} steps for {target}")
    return None
