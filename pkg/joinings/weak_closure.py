"""Search for a power of T whose graph joining is KR-close to (Id + T^k) / 2."""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Tuple

import numpy as np

from iet_core import Iet3

from .kr import kr_bound
from .measures import DiscreteMeasure2D, stratified_points

logger = logging.getLogger(__name__)

SCREEN_TOP = 5


@dataclass
class WeakClosureResult:
    """
    Best power found for the half-identity, half-T^k target.

    Attributes:
        k: The power in the target
        best_n: Minimizing exponent
        kr_error: KR distance between the power joining and the target
        slack: Certified error of kr_error (non-zero only for quantized solves)
        method: KR solver used for the winner
        screened: (n, coupling bound) of the candidates solved exactly
    """

    k: int
    best_n: int
    kr_error: float
    slack: float
    method: str
    screened: List[Tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "best_n": self.best_n,
            "kr_error": self.kr_error,
            "slack": self.slack,
            "method": self.method,
            "screened": [[n, b] for n, b in self.screened],
        }


def _powers(
    iet: Iet3, xs: np.ndarray, horizon: int
) -> Iterator[Tuple[int, np.ndarray]]:
    """(n, T^n xs) for |n| <= horizon, stepping both ways from 0."""
    yield 0, xs
    forward, backward = xs, xs
    inverse = iet.inverse()
    for n in range(1, horizon + 1):
        forward = iet.apply_array(forward)
        backward = inverse.apply_array(backward)
        yield n, forward
        yield -n, backward


def weak_closure_check(
    iet: Iet3,
    k: int,
    horizon: int,
    n_atoms: int,
    rng: np.random.Generator,
    screen_top: int = SCREEN_TOP,
) -> WeakClosureResult:
    """
    Minimize over |n| <= horizon the KR distance from nu_n to (nu_0 + nu_k) / 2.

    All joinings share one stratified sample of x. Every candidate is first ranked
    by the cost of the coupling that keeps x fixed, an upper bound of its distance;
    the best screen_top candidates are then solved exactly.

    Args:
        iet: The exchange
        k: Power in the target
        horizon: Search radius (>= 1)
        n_atoms: Atoms per joining
        rng: Seeded generator
        screen_top: Number of candidates solved exactly
    """
    if horizon < 1:
        raise ValueError("Horizon must be positive")
    xs = stratified_points(n_atoms, rng)
    tk = iet.apply_array(xs, k)
    target = DiscreteMeasure2D.mixture(
        [DiscreteMeasure2D.uniform(xs, xs), DiscreteMeasure2D.uniform(xs, tk)]
    )

    bounds = []
    for n, tn in _powers(iet, xs, horizon):
        bound = 0.5 * float(np.mean(np.abs(tn - xs) + np.abs(tn - tk)))
        bounds.append((bound, abs(n), n))
    bounds.sort()
    screened = [(n, b) for b, _, n in bounds[: max(1, screen_top)]]

    best = None
    for n, _ in screened:
        result = kr_bound(DiscreteMeasure2D.uniform(xs, iet.apply_array(xs, n)), target)
        if best is None or result.value < best[1].value:
            best = (n, result)
    assert best is not None
    n, result = best
    logger.info(f"Weak closure k={k}: best n={n} with KR {result.value:.4g}")
    return WeakClosureResult(k, n, result.value, result.slack, result.method, screened)
