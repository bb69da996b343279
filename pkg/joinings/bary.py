"""Cyclic averaging recursion of the switch weights and its contraction."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

logger = logging.getLogger(__name__)

MEAN_TOL = 1e-12
# gaps below this fraction of the first gap are rounding noise
GAP_FLOOR = 1e-8


@dataclass
class BaryState:
    """
    Weights gamma_0..gamma_{d-1} of d strands and the per-step switch parameters.

    Attributes:
        gamma: Current weights in [0,1]
        a: Weight kept from the previous strand
        b: Weight kept from the strand itself
        delta: Additive perturbation per step
    """

    gamma: List[float]
    a: float
    b: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if len(self.gamma) < 2:
            raise ValueError("Need at least two strands")
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"Switch weights must be positive: a={self.a}, b={self.b}")
        if self.a + self.b > 1 + MEAN_TOL:
            raise ValueError(f"a + b = {self.a + self.b} exceeds 1")
        if any(g < 0 or g > 1 for g in self.gamma):
            raise ValueError("Weights must lie in [0,1]")

    @property
    def d(self) -> int:
        return len(self.gamma)

    def step(self) -> "BaryState":
        """gamma_i <- (a gamma_{i-1} + b gamma_i) / (a + b) + delta, indices mod d."""
        g = np.asarray(self.gamma, dtype=float)
        s = self.a + self.b
        new = (self.a / s) * np.roll(g, 1) + (self.b / s) * g + self.delta
        return BaryState(list(np.clip(new, 0.0, 1.0)), self.a, self.b, self.delta)


def max_gap(gamma: List[float]) -> float:
    return float(max(gamma) - min(gamma))


def hilbert_diameter(gamma: List[float]) -> Optional[float]:
    """Hilbert projective diameter ln(max / min); None when a weight is zero."""
    low = min(gamma)
    if low <= 0:
        return None
    return math.log(max(gamma) / low)


@dataclass
class BaryReport:
    """
    Trajectory of the recursion.

    Attributes:
        trajectory: gamma after each step, the initial state first
        gaps: max pairwise gap per entry of the trajectory
        hilbert: Hilbert diameter per entry (None while a weight is zero)
        decay_rate: Geometric mean of successive gap ratios, None if a gap vanishes
        contraction_bound: 1 - 2 min(a,b) / (a+b), the per-cycle bound on the gap ratio
        mean_drift: Largest deviation of mean(gamma) from its initial value
    """

    trajectory: List[List[float]]
    gaps: List[float]
    hilbert: List[Optional[float]]
    decay_rate: Optional[float]
    contraction_bound: float
    mean_drift: float = field(default=0.0)

    def to_dict(self) -> dict:
        return {
            "gaps": self.gaps,
            "hilbert": self.hilbert,
            "decay_rate": self.decay_rate,
            "contraction_bound": self.contraction_bound,
            "mean_drift": self.mean_drift,
            "final": self.trajectory[-1],
        }


def bary_recursion(state: BaryState, steps: int) -> BaryReport:
    """
    Iterate the recursion and summarize its contraction.

    Args:
        state: Initial weights and parameters
        steps: Number of steps (>= 0)
    """
    if steps < 0:
        raise ValueError("Steps must be non-negative")
    trajectory = [list(map(float, state.gamma))]
    current = state
    for _ in range(steps):
        current = current.step()
        trajectory.append(list(map(float, current.gamma)))

    gaps = [max_gap(g) for g in trajectory]
    floor = GAP_FLOOR * gaps[0]
    ratios = [
        g1 / g0 for g0, g1 in zip(gaps[:-1], gaps[1:]) if g0 > floor and g1 > floor
    ]
    decay = None
    if ratios and all(r > 0 for r in ratios):
        decay = float(np.exp(np.mean(np.log(ratios))))
    mean0 = float(np.mean(trajectory[0]))
    drift = max(abs(float(np.mean(g)) - mean0) for g in trajectory)
    bound = 1 - 2 * min(state.a, state.b) / (state.a + state.b)
    logger.debug(f"Bary recursion d={state.d}: gaps {gaps[:4]}..., decay {decay}")
    hilbert = [hilbert_diameter(g) for g in trajectory]
    return BaryReport(trajectory, gaps, hilbert, decay, bound, drift)
