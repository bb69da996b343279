"""End-to-end witness that the self-joinings of T are not 2-simple."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from iet_core import Iet3
from joinings import (
    DiscreteMeasure2D,
    disintegrate,
    fiber_diameter_stats,
    kr_bound,
    induced_orbit_blocks,
    sample_power_joining,
    stratified_points,
    test_function_family,
)
from logger_manager import LoggerManager, LogTag
from models import CheckResult

from .ksv import KsvReport, ksv_check
from .schedule import Schedule, geometric_eps, run_schedule

logger = logging.getLogger(__name__)

KEEP_AWAY = 40.0
FAT_FIBER_FRACTION = 0.7
BIRKHOFF_STARTS = 10
BIRKHOFF_FUNCTIONS = 5
BIRKHOFF_LENGTH = 10_000
BIRKHOFF_HEIGHTS = 10
MAX_BIRKHOFF_LENGTH = 10**9
BIRKHOFF_TOL = 0.05


@dataclass
class WitnessReport:
    """
    The four witness items and the supporting schedule data.

    Attributes:
        checks: product_separation, product_budget, mixture_closeness,
            fat_fibers, birkhoff_agreement, schedule_complete and constant_fit
        c_hat: Empirical constant fitted from strand divergence
        median_step: Median of |x - Tx|
        eps: The epsilon sequence used
        schedule: The schedule run
        ksv: Condition report of the schedule
    """

    checks: List[CheckResult]
    c_hat: float
    median_step: float
    eps: List[float]
    schedule: Schedule
    ksv: KsvReport
    data: dict = field(default_factory=dict)

    @property
    def is_witness(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "is_witness": self.is_witness,
            "c_hat": self.c_hat,
            "median_step": self.median_step,
            "eps": self.eps,
            "checks": [c.to_dict() for c in self.checks],
            "schedule": self.schedule.to_dict(),
            "ksv": self.ksv.to_dict(),
            **self.data,
        }


def median_step(iet: Iet3, n_points: int, rng: np.random.Generator) -> float:
    """Median of d(x, Tx) over stratified points."""
    xs = stratified_points(n_points, rng)
    return float(np.median(np.abs(iet.apply_array(xs, 1) - xs)))


def fit_constant(divergences: Sequence[float], eps: Sequence[float]) -> float:
    """
    Smallest C with divergence_k <= C (sum_{j>k} eps_j + 2^-k) at every level k.

    Level 0 uses the whole sum plus one.
    """
    ratios = []
    for k, div in enumerate(divergences):
        scale = sum(eps[k:]) + 2.0**-k
        ratios.append(div / scale)
    return max(ratios) if ratios else 0.0


def birkhoff_length(schedule: Schedule) -> int:
    """
    Orbit window long enough to cross the schedule's switch towers many times.

    Orbits stay inside A or B for up to r steps, so the window is at least
    BIRKHOFF_HEIGHTS * max r, capped at MAX_BIRKHOFF_LENGTH.
    """
    tallest = max((lv.r for lv in schedule.levels), default=0)
    window = max(BIRKHOFF_LENGTH, BIRKHOFF_HEIGHTS * tallest)
    return int(min(window, MAX_BIRKHOFF_LENGTH))


def birkhoff_spread(
    iet: Iet3,
    exponents: Sequence[int],
    rng: np.random.Generator,
    starts: int = BIRKHOFF_STARTS,
    length: int = BIRKHOFF_LENGTH,
) -> List[float]:
    """
    Spread of time averages of f(|x - y|) along (T^i x, T^(i+n) x).

    Starting atoms are drawn from the equal mixture of the strands; one spread per
    test function.
    """
    functions = test_function_family()[:BIRKHOFF_FUNCTIONS]
    averages = np.empty((starts, len(functions)))
    for row in range(starts):
        n = exponents[int(rng.integers(len(exponents)))]
        x = float(rng.random())
        totals = np.zeros(len(functions))
        pairs = zip(
            induced_orbit_blocks(iet, x, length),
            induced_orbit_blocks(iet, float(iet.apply_pow(n, x)), length),
        )
        for xs, ys in pairs:
            gaps = np.abs(xs - ys)
            totals += [float(np.sum(f(gaps))) for f in functions]
        averages[row] = totals / length
    return [float(v) for v in averages.max(axis=0) - averages.min(axis=0)]


def non_simplicity_witness(
    iet: Iet3,
    K_levels: int,
    n_atoms: int,
    rng: np.random.Generator,
    exponents: Sequence[int] = (0, 1),
    delta: float = 0.1,
    t_max: float = 8.0,
    samples: int = 10_000,
    bins: int = 128,
    c_hat: Optional[float] = None,
) -> WitnessReport:
    """
    Run a two-strand schedule and test its average against product and mixture.

    The epsilon sequence is geometric with 40 * C * sum(eps) equal to the median of
    |x - Tx|; C is taken as 1 for the run (or the given c_hat) and refitted from the
    measured strand divergence afterwards.

    Args:
        iet: The exchange
        K_levels: Number of levels (>= 2)
        n_atoms: Atoms per strand
        rng: Seeded generator
        exponents: Initial strand exponents
        delta: Acceptance radius of the renormalization search
        t_max: Search horizon of the first level
        samples: Verification samples per switch
        bins: Disintegration bins for the fiber statistics
        c_hat: Constant used to size epsilon; 1 if omitted
    """
    if K_levels < 2:
        raise ValueError("A witness needs at least two levels")
    log = LoggerManager()
    step = median_step(iet, n_atoms, rng)
    c_run = 1.0 if c_hat is None else c_hat
    eps0 = step / (KEEP_AWAY * c_run)
    eps = geometric_eps(eps0, K_levels)
    log.log_info(f"Median step {step:.4g}, eps_1 = {eps[0]:.4g}", LogTag.WITNESS)

    result = run_schedule(
        iet,
        exponents,
        eps,
        K_levels,
        n_atoms,
        rng,
        delta=delta,
        t_max=t_max,
        samples=samples,
    )
    schedule = result.schedule
    ksv = ksv_check(iet, schedule, rng)
    fitted = fit_constant(schedule.divergences(), eps)
    total_eps = float(sum(eps))

    product = DiscreteMeasure2D.uniform(
        stratified_points(n_atoms, rng), rng.random(n_atoms)
    )
    mixture = DiscreteMeasure2D.mixture(
        [sample_power_joining(iet, n, n_atoms, rng) for n in exponents]
    )
    to_product = kr_bound(result.average, product)
    to_mixture = kr_bound(result.average, mixture)
    fibers = fiber_diameter_stats(disintegrate(result.average, bins), 0.0, step / 2)
    window = birkhoff_length(schedule)
    spreads = birkhoff_spread(iet, schedule.exponents, rng, length=window)

    budget = max(fitted, c_run) * total_eps
    checks = [
        CheckResult.at_least(
            "product_separation",
            to_product.value - to_product.slack,
            to_mixture.upper,
            "KR to product exceeds KR to the mixture",
        ),
        CheckResult.at_least(
            "product_budget",
            to_product.value - to_product.slack,
            4 * budget,
            "KR to product beyond four times the mixture budget",
        ),
        CheckResult.at_most("mixture_closeness", to_mixture.value, budget),
        CheckResult.at_least(
            "fat_fibers",
            fibers.fraction_above,
            FAT_FIBER_FRACTION,
            f"threshold {step / 2:.4g}",
        ),
        CheckResult.at_most("birkhoff_agreement", max(spreads), BIRKHOFF_TOL),
        CheckResult(
            "schedule_complete",
            schedule.completed,
            detail=schedule.failure or f"{len(schedule.levels)} levels",
        ),
        CheckResult.at_most("constant_fit", KEEP_AWAY * fitted * total_eps, step),
    ]
    for check in checks:
        log.log_check(LogTag.WITNESS, check.name, check.passed, check.margin)
    data = {
        "kr_to_product": to_product.to_dict(),
        "kr_to_mixture": to_mixture.to_dict(),
        "fibers": fibers.to_dict(),
        "birkhoff_spreads": spreads,
        "birkhoff_length": window,
        "bins": bins,
    }
    return WitnessReport(checks, fitted, step, eps, schedule, ksv, data)
