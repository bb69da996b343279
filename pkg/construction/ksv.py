"""Checks of the conditions a schedule must meet for its limit joining to exist."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from iet_core import Iet3
from joinings import empirical_orbit_joining, kr_bound, sample_power_joining
from logger_manager import LoggerManager, LogTag
from models import CheckResult

from .schedule import Schedule
from .switch import sample_A

logger = logging.getLogger(__name__)

BIRKHOFF_POINTS = 4
MAX_BIRKHOFF_WINDOW = 20_000
MEASURE_RATIO = 5.0


@dataclass
class KsvReport:
    """
    One check per condition, in the order a, b, c, d, e, A, B.

    Attributes:
        checks: Condition outcomes with margins
        c: Largest admissible lower bound on the measures of A_k and B_k
    """

    checks: List[CheckResult] = field(default_factory=list)
    c: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(ch.passed for ch in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "c": self.c,
            "checks": [ch.to_dict() for ch in self.checks],
        }


def _measures(s: Schedule) -> CheckResult:
    sizes = [
        min(sw.measure_A, sw.measure_B)
        for lv in s.levels
        for sw in lv.switches
        if not sw.trivial
    ]
    if not sizes:
        return CheckResult.vacuous("a_measures")
    c = min(sizes)
    bound = MEASURE_RATIO * max(s.eps)
    return CheckResult.at_least(
        "a_measures", c, bound, "min lambda(A_k), lambda(B_k) vs 5 eps"
    )


def _returns(s: Schedule) -> CheckResult:
    ratios = [
        sw.return_bound / (1.5 * sw.r)
        for lv in s.levels
        for sw in lv.switches
        if not sw.trivial
    ]
    if not ratios:
        return CheckResult.vacuous("b_return_time")
    return CheckResult.at_least(
        "b_return_time", min(ratios), 1.0, "min over switches of return bound / 1.5 r"
    )


def _exceptional(s: Schedule) -> CheckResult:
    if not s.levels:
        return CheckResult.vacuous("c_exceptional")
    slack = min(lv.epsilon - lv.exceptional_mass() for lv in s.levels)
    worst = max(s.levels, key=lambda lv: lv.exceptional_mass() - lv.epsilon)
    return CheckResult.at_most(
        "c_exceptional",
        worst.exceptional_mass(),
        worst.epsilon,
        f"lambda(U_k) < eps_k at every level (min slack {slack:.3g})",
    )


def tail_products(s: Schedule) -> List[float]:
    """r_k * sum_{i>k} lambda(J_i) for k = 1..K-1."""
    lengths = [lv.J_length for lv in s.levels]
    return [lv.r * sum(lengths[k + 1 :]) for k, lv in enumerate(s.levels[:-1])]


def _tails(s: Schedule) -> CheckResult:
    tails = tail_products(s)
    if len(tails) < 2:
        detail = f"values {tails}" if tails else "fewer than two levels"
        return CheckResult.vacuous("d_tail_products", detail)
    decreasing = all(t2 < t1 for t1, t2 in zip(tails[:-1], tails[1:]))
    return CheckResult(
        "d_tail_products", decreasing, tails[-1], tails[0], None, f"values {tails}"
    )


def _summable(s: Schedule) -> CheckResult:
    eps = s.eps
    ok = all(e > 0 for e in eps) and all(b <= a for a, b in zip(eps[:-1], eps[1:]))
    return CheckResult(
        "e_summable", ok, float(sum(eps)), None, None, "non-increasing, positive"
    )


def _switching(s: Schedule) -> CheckResult:
    margins = [
        check.margin
        for lv in s.levels
        for sw in lv.switches
        for check in sw.diagnostics
        if check.name in ("kr_A", "kr_B") and check.margin is not None
    ]
    if not margins:
        return CheckResult.vacuous("A_switching")
    return CheckResult.at_least(
        "A_switching", min(margins), 0.0, "worst KR margin of the switches"
    )


def _birkhoff(iet: Iet3, s: Schedule, rng: np.random.Generator) -> CheckResult:
    """Orbit windows of length r_(k+1) / 9 from A_k against the strand joining."""
    if len(s.levels) < 2:
        return CheckResult.vacuous("B_birkhoff", "needs level k+1")
    margins = []
    for lv, nxt in zip(s.levels[:-1], s.levels[1:]):
        window = min(max(1, math.ceil(nxt.r / 9)), MAX_BIRKHOFF_WINDOW)
        bound = 2 * lv.epsilon + 4 / math.sqrt(window)
        for sw in lv.switches:
            for x in sample_A(sw, BIRKHOFF_POINTS, rng):
                orbit = empirical_orbit_joining(iet, float(x), sw.n, window)
                reference = sample_power_joining(iet, sw.n, window, rng)
                margins.append(bound - kr_bound(orbit, reference).upper)
    if not margins:
        return CheckResult.vacuous("B_birkhoff")
    return CheckResult.at_least(
        "B_birkhoff", min(margins), 0.0, "min margin over windows"
    )


def ksv_check(iet: Iet3, s: Schedule, rng: np.random.Generator) -> KsvReport:
    """
    Evaluate every condition on a built schedule.

    Args:
        iet: The exchange the schedule was built for
        s: The schedule
        rng: Generator for the Birkhoff windows

    Returns:
        KsvReport with one check per condition
    """
    report = KsvReport()
    measures = _measures(s)
    report.c = measures.value
    report.checks = [
        measures,
        _returns(s),
        _exceptional(s),
        _tails(s),
        _summable(s),
        _switching(s),
        _birkhoff(iet, s, rng),
    ]
    log = LoggerManager()
    for check in report.checks:
        log.log_check(LogTag.SCHEDULE, check.name, check.passed, check.margin)
    return report
