"""Iterated switches between d strands of power joinings."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from iet_core import (
    Iet3,
    IetError,
    SearchFailure,
    convergents,
    partial_quotients,
)
from joinings import DiscreteMeasure2D, kr_bound, sample_power_joining
from logger_manager import LoggerManager, LogTag
from models import CheckResult

from .switch import (
    VERIFY_SAMPLES,
    SwitchResult,
    SwitchSpec,
    build_switch,
    trivial_switch,
)

logger = logging.getLogger(__name__)

LEVEL_T_STEP = 3.0
# past the next convergent scale, so the grid around it is searched too
HORIZON_MARGIN = 0.5
MAX_LEVEL_HORIZON = 25.0
DIVERGENCE_ATOMS = 2000


def geometric_eps(eps: float, levels: int) -> List[float]:
    """eps_k = eps / 2^k for k = 1..levels."""
    return [eps / 2**k for k in range(1, levels + 1)]


@dataclass
class ScheduleLevel:
    """
    One level of the schedule.

    Attributes:
        k: Level index, starting at 1
        epsilon: eps_k
        exponents_before: Strand exponents entering the level
        exponents_after: Strand exponents produced by the switches
        switches: One switch per strand; strand l follows strand l-1 on A
        level_size: Check max(r of previous level) * lambda(J_k) < eps_k
        divergence: max over strands of KR(strand, average) after the level
    """

    k: int
    epsilon: float
    exponents_before: List[int]
    exponents_after: List[int]
    switches: List[SwitchResult]
    level_size: CheckResult
    divergence: float = 0.0

    @property
    def r(self) -> int:
        return max(sw.r for sw in self.switches)

    @property
    def J_length(self) -> float:
        return max((sw.J_length for sw in self.switches if not sw.trivial), default=0.0)

    @property
    def t(self) -> float:
        return max((sw.t for sw in self.switches if sw.t is not None), default=0.0)

    def exceptional_mass(self) -> float:
        """Mass of A and B failing shadowing, from the last verification."""
        total = 0.0
        for sw in self.switches:
            for check in sw.diagnostics:
                if check.name == "shadowing_A" and check.value is not None:
                    total += sw.measure_A * (1 - check.value)
                elif check.name == "shadowing_B" and check.value is not None:
                    total += sw.measure_B * (1 - check.value)
        return total / len(self.switches)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "epsilon": self.epsilon,
            "exponents_before": self.exponents_before,
            "exponents_after": self.exponents_after,
            "r": self.r,
            "J_length": self.J_length,
            "t": self.t,
            "exceptional_mass": self.exceptional_mass(),
            "divergence": self.divergence,
            "level_size": self.level_size.to_dict(),
            "switches": [sw.to_dict() for sw in self.switches],
        }


@dataclass
class Schedule:
    """
    Switch levels applied to d strands.

    Attributes:
        initial: Exponents n_0 of the strands
        eps: The epsilon sequence requested
        levels: Completed levels
        aborted_at: Level whose construction failed, if any
        failure: Message of that failure
        initial_divergence: max KR(strand, average) before any switch
    """

    initial: List[int]
    eps: List[float]
    levels: List[ScheduleLevel] = field(default_factory=list)
    aborted_at: Optional[int] = None
    failure: str = ""
    initial_divergence: float = 0.0

    @property
    def d(self) -> int:
        return len(self.initial)

    @property
    def exponents(self) -> List[int]:
        return self.levels[-1].exponents_after if self.levels else list(self.initial)

    @property
    def completed(self) -> bool:
        return self.aborted_at is None

    def divergences(self) -> List[float]:
        return [self.initial_divergence] + [lv.divergence for lv in self.levels]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "initial": self.initial,
            "eps": self.eps,
            "final_exponents": self.exponents,
            "aborted_at": self.aborted_at,
            "failure": self.failure,
            "divergences": self.divergences(),
            "levels": [lv.to_dict() for lv in self.levels],
        }


@dataclass
class ScheduleResult:
    """
    A schedule with the empirical strands of its last completed level.

    Attributes:
        schedule: The levels
        strands: Power joining of each strand's final exponent
        average: Equal mixture of the strands
    """

    schedule: Schedule
    strands: List[DiscreteMeasure2D]
    average: DiscreteMeasure2D


def strand_measures(
    iet: Iet3, exponents: Sequence[int], n_atoms: int, rng: np.random.Generator
) -> List[DiscreteMeasure2D]:
    return [sample_power_joining(iet, n, n_atoms, rng) for n in exponents]


def strand_divergence(
    iet: Iet3, exponents: Sequence[int], n_atoms: int, rng: np.random.Generator
) -> float:
    """max over strands of the KR distance to the strands' average."""
    strands = strand_measures(iet, exponents, n_atoms, rng)
    average = DiscreteMeasure2D.mixture(strands)
    return max(kr_bound(s, average).value for s in strands)


def _validate(exponents: Sequence[int], eps: Sequence[float], levels: int) -> None:
    if len(exponents) < 2:
        raise ValueError("A schedule needs at least two strands")
    if levels < 0:
        raise ValueError("K_levels must be non-negative")
    if len(eps) < levels:
        raise ValueError(f"Need {levels} epsilons, got {len(eps)}")
    if any(e <= 0 for e in eps):
        raise ValueError("Epsilons must be positive")
    if any(e2 > e1 for e1, e2 in zip(eps[:-1], eps[1:])):
        raise ValueError("Epsilons must be non-increasing")


def level_horizon(iet: Iet3, t_min: float, base: float) -> float:
    """
    Search horizon of a level whose times must exceed t_min.

    Renormalization times sit at convergent denominators of alpha, which can be
    far apart. The horizon is base, widened to reach ln q + HORIZON_MARGIN for the
    first convergent denominator q with ln q > t_min, and capped at
    MAX_LEVEL_HORIZON.
    """
    alpha, _ = iet.exact_rotation()
    horizon = base
    for _, q in convergents(partial_quotients(alpha)):
        if q > 0 and math.log(q) > t_min + 1e-12:
            horizon = max(base, math.log(q) + HORIZON_MARGIN)
            break
    return min(horizon, max(base, MAX_LEVEL_HORIZON))


def _switch_for(
    iet: Iet3,
    a: int,
    b: int,
    eps: float,
    t_min: float,
    t_max: float,
    delta: float,
    samples: int,
    rng: np.random.Generator,
) -> SwitchResult:
    trivial = trivial_switch(iet, a, b, eps, rng)
    if trivial is not None:
        return trivial
    spec = SwitchSpec(a, b, eps, delta=delta, t_max=t_max, t_min=t_min, samples=samples)
    return build_switch(iet, spec, rng)


def _build_level(
    iet: Iet3,
    k: int,
    exponents: List[int],
    eps: float,
    previous_r: int,
    t_min: float,
    base_horizon: float,
    delta: float,
    samples: int,
    rng: np.random.Generator,
) -> ScheduleLevel:
    """Switch every strand toward its predecessor; later times until J is thin."""
    while True:
        t_max = level_horizon(iet, t_min, base_horizon)
        switches = [
            _switch_for(
                iet,
                exponents[i - 1],
                exponents[i],
                eps,
                t_min,
                t_max,
                delta,
                samples,
                rng,
            )
            for i in range(len(exponents))
        ]
        after = [sw.n for sw in switches]
        vacuous = CheckResult.vacuous("level_size")
        level = ScheduleLevel(k, eps, list(exponents), after, switches, vacuous)
        if previous_r == 0 or level.J_length == 0:
            return level
        level.level_size = CheckResult.at_most(
            "level_size", previous_r * level.J_length, eps, "max r_(k-1) * lambda(J_k)"
        )
        if level.level_size.passed:
            return level
        if level.t <= t_min:
            raise SearchFailure(f"Level {k}: J does not shrink below eps / r")
        t_min = level.t


def run_schedule(
    iet: Iet3,
    exponents: Sequence[int],
    eps: Sequence[float],
    K_levels: int,
    n_atoms: int,
    rng: np.random.Generator,
    delta: float = 0.1,
    t_max: float = 8.0,
    samples: int = VERIFY_SAMPLES,
) -> ScheduleResult:
    """
    Apply K_levels rounds of cyclic switches and sample the resulting strands.

    Level k searches renormalization times above those of level k-1, up to
    t_max + 3(k-1) or just past the next convergent scale of alpha, whichever is
    later (see level_horizon). A failing level ends the schedule; the levels built
    so far and the strands at the last completed level are still returned.

    Args:
        iet: The exchange
        exponents: Initial strand exponents (d >= 2)
        eps: eps_1..eps_K, positive and non-increasing
        K_levels: Number of levels
        n_atoms: Atoms per strand joining
        rng: Seeded generator
        delta: Acceptance radius of the renormalization search
        t_max: Search horizon of the first level
        samples: Verification samples per switch
    """
    _validate(exponents, eps, K_levels)
    log = LoggerManager()
    schedule = Schedule(list(exponents), list(eps[:K_levels]))
    div_atoms = min(n_atoms, DIVERGENCE_ATOMS)
    schedule.initial_divergence = strand_divergence(iet, exponents, div_atoms, rng)

    current, previous_r, t_min = list(exponents), 0, 0.0
    for k in range(1, K_levels + 1):
        try:
            level = _build_level(
                iet,
                k,
                current,
                eps[k - 1],
                previous_r,
                t_min,
                t_max + LEVEL_T_STEP * (k - 1),
                delta,
                samples,
                rng,
            )
        except IetError as e:
            schedule.aborted_at, schedule.failure = k, str(e)
            log.log_error(f"Schedule aborted at level {k}", e)
            break
        level.divergence = strand_divergence(iet, level.exponents_after, div_atoms, rng)
        schedule.levels.append(level)
        log.log_info(
            f"Level {k}: exponents {level.exponents_after}, r={level.r}, "
            f"divergence {level.divergence:.4g}",
            LogTag.SCHEDULE,
        )
        current, previous_r = level.exponents_after, level.r
        t_min = max(t_min, level.t)

    strands = strand_measures(iet, schedule.exponents, n_atoms, rng)
    return ScheduleResult(schedule, strands, DiscreteMeasure2D.mixture(strands))

