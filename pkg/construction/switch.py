"""
The switch: one power of T that follows T^a on a set A and T^b on a set B.

Near a renormalization time the map T^m moves most points of the dominant crossing
region by the same small amount s, and T^(m+1) does the same on the neighbouring
region. With n = b + (m+1)(a-b) = a + m(a-b), the power T^n therefore shadows T^a
on the tower A built over a thin interval J of the count-m region and T^b on the
count-(m+1) region B.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from iet_core import (
    DegenerateRotationError,
    GeometryTooCoarseError,
    Iet3,
    Interval,
    IntervalSet,
    InvalidSpecError,
    SearchFailure,
    min_return_time,
    return_time_lower_bound,
)
from joinings import empirical_orbit_joining, kr_bound, sample_power_joining
from logger_manager import LoggerManager, LogTag
from models import CheckResult
from renorm import RenormTime, crossing_profile, find_renorm_times, renorm_time_at
from towers import Tower, build_tower

from .sampling import sample_interval_set, sample_intervals

logger = logging.getLogger(__name__)

SHADOWING_FRACTION = 0.95
KR_SAMPLES = 8
VERIFY_SAMPLES = 10_000
TRANSPORT_RETURN_LIMIT = 20_000
WIDTH_FACTOR = Fraction(999_999_999, 1_000_000_000)
CHAIN_TOL = 1e-6


class SwitchStatus(Enum):
    VERIFIED = "verified"
    UNVERIFIED = "unverified"


@dataclass(frozen=True)
class SwitchSpec:
    """
    Parameters of one switch.

    Attributes:
        a: Power followed on A
        b: Power followed on B
        epsilon: Closeness target
        t: Renormalization time; searched when omitted
        delta: Acceptance radius for the search
        t_max: Largest flow time of the search
        t_min: Only times strictly above this are used
        samples: Points used to verify the construction
        seed: Seed of the verification generator when none is passed
    """

    a: int
    b: int
    epsilon: float
    t: Optional[float] = None
    delta: float = 0.1
    t_max: float = 8.0
    t_min: float = 0.0
    samples: int = VERIFY_SAMPLES
    seed: int = 0

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise InvalidSpecError(f"A switch needs a != b, got a = b = {self.a}")
        if not self.epsilon > 0:
            raise InvalidSpecError(f"epsilon must be positive, got {self.epsilon}")
        if self.samples < 0:
            raise InvalidSpecError("samples must be non-negative")

    @property
    def gap(self) -> int:
        return abs(self.a - self.b)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "epsilon": self.epsilon,
            "t": self.t,
            "delta": self.delta,
            "t_max": self.t_max,
        }


def switch_exponent(a: int, b: int, m: int) -> int:
    """n = b + (m+1)(a-b), which equals a + m(a-b)."""
    return b + (m + 1) * (a - b)


@dataclass
class SwitchResult:
    """
    A constructed switch with its geometry and diagnostics.

    Attributes:
        a: Power followed on A
        b: Power followed on B
        epsilon: Closeness target
        n: The switching exponent
        m: Dominant crossing count
        r: Height of the tower over J, m * p_hat
        L: Window length of the orbit joinings, equal to m
        p_hat: Number of s-steps of J inside the count-m piece
        rho: Horizontal displacement at the renormalization time
        shift: Signed displacement s of T^m on the count-m piece
        t: Renormalization time used
        q: Integer scale e^t
        J: Base interval of width about |s|
        run_tower: The m levels T^i R over the run R = J, J+s, ..., J+(p_hat-1)s
        A: Union of the r levels T^i J
        B: Count-(m+1) region away from its ends, minus A
        V_len: IET measure of the regular count-m region
        return_bound: Lower bound on the minimal return time of J
        return_certificate: "continued-fraction" or "transport"
        trivial: Whether T^(a-b) was already close to the identity
        status: Verification outcome
        diagnostics: Checks of the last verification
    """

    a: int
    b: int
    epsilon: float
    n: int
    m: int
    r: int
    L: int
    p_hat: int
    rho: float
    shift: float
    t: Optional[float]
    q: Optional[int]
    J: Interval
    run_tower: Optional[Tower]
    A: IntervalSet
    B: IntervalSet
    V_len: float
    return_bound: int
    return_certificate: str
    trivial: bool = False
    status: SwitchStatus = SwitchStatus.UNVERIFIED
    diagnostics: List[CheckResult] = field(default_factory=list)

    @property
    def measure_A(self) -> float:
        return self.A.measure

    @property
    def measure_B(self) -> float:
        return self.B.measure

    @property
    def J_length(self) -> float:
        return float(self.J.b) - float(self.J.a)

    def failing(self) -> List[str]:
        return [c.name for c in self.diagnostics if not c.passed]

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "epsilon": self.epsilon,
            "n": self.n,
            "m": self.m,
            "r": self.r,
            "L": self.L,
            "p_hat": self.p_hat,
            "rho": self.rho,
            "shift": self.shift,
            "t": self.t,
            "q": self.q,
            "J": list(self.J.to_tuple()),
            "measure_A": self.measure_A,
            "measure_B": self.measure_B,
            "V_len": self.V_len,
            "return_bound": self.return_bound,
            "return_certificate": self.return_certificate,
            "trivial": self.trivial,
            "status": self.status.value,
            "diagnostics": [c.to_dict() for c in self.diagnostics],
        }


def _interval(iet: Iet3, a: Fraction, b: Fraction) -> Interval:
    mode = iet.mode
    with mode.context():
        return Interval(mode.coerce(a), mode.coerce(b))


def _return_bound(iet: Iet3, J: Interval, width: Fraction, r: int) -> Tuple[int, str]:
    """Certify min return time of J >= 1.5 r, by continued fractions or transport."""
    alpha, kappa = iet.exact_rotation()
    target = math.ceil(1.5 * r)
    bound, _ = return_time_lower_bound(alpha, kappa, width)
    if bound >= target or target > TRANSPORT_RETURN_LIMIT:
        return bound, "continued-fraction"
    first = min_return_time(iet, J, target)
    if first is None:
        return target + 1, "transport"
    return first, "transport"


def _assemble(iet: Iet3, spec: SwitchSpec, rt: RenormTime) -> SwitchResult:
    profile = crossing_profile(iet, rt.q)
    m = rt.m
    s = profile.shift
    if s == 0 or rt.rho <= 0:
        raise DegenerateRotationError(f"No displacement at q = {rt.q}")
    step = abs(s)
    margin = 2 + spec.gap

    pieces = profile.region(m)
    if not pieces:
        raise GeometryTooCoarseError(f"No regular count-{m} piece at q = {rt.q}")
    low, high = max(pieces, key=lambda ab: ab[1] - ab[0])
    run = math.floor((high - low) / step) - 2 * margin
    by_mass = math.floor(rt.V_len / rt.rho) - 2 * margin - 3
    p_hat = min(by_mass, run)
    if p_hat < 1:
        raise GeometryTooCoarseError(
            f"p_hat = {p_hat} < 1 at q = {rt.q} (mass bound {by_mass}, run {run})"
        )

    width = step * WIDTH_FACTOR
    if s > 0:
        start = low + margin * step
        run_lo, run_hi = start, start + (p_hat - 1) * step + width
        j_lo, j_hi = start, start + width
    else:
        end = high - margin * step
        run_lo, run_hi = end - (p_hat - 1) * step - width, end
        j_lo, j_hi = end - width, end
    J = _interval(iet, j_lo, j_hi)
    run_tower = build_tower(iet, _interval(iet, run_lo, run_hi), m)
    A = run_tower.level_set()

    with iet.mode.context():
        radius = iet.mode.coerce((4 + spec.gap) * width)
        B = profile.region_set(iet, m + 1).erode(radius).difference(A)

    r = m * p_hat
    return_bound, certificate = _return_bound(iet, J, width, r)
    return SwitchResult(
        a=spec.a,
        b=spec.b,
        epsilon=spec.epsilon,
        n=switch_exponent(spec.a, spec.b, m),
        m=m,
        r=r,
        L=m,
        p_hat=p_hat,
        rho=rt.rho,
        shift=float(s),
        t=rt.t,
        q=rt.q,
        J=J,
        run_tower=run_tower,
        A=A,
        B=B,
        V_len=rt.V_len,
        return_bound=return_bound,
        return_certificate=certificate,
    )


def _candidate_times(iet: Iet3, spec: SwitchSpec) -> List[RenormTime]:
    if spec.t is not None:
        return [renorm_time_at(iet, spec.t)]
    found = find_renorm_times(iet, spec.delta, spec.t_max)
    times = [rt for rt in found if rt.t > spec.t_min]
    if not times:
        raise SearchFailure(
            f"No renormalization time within delta = {spec.delta} "
            f"in ({spec.t_min}, {spec.t_max}]"
        )
    return times


def build_switch(
    iet: Iet3, spec: SwitchSpec, rng: Optional[np.random.Generator] = None
) -> SwitchResult:
    """
    Construct the switch at the first workable renormalization time and verify it.

    Args:
        iet: The exchange
        spec: Switch parameters
        rng: Generator for the verification samples; seeded from spec.seed if omitted

    Returns:
        The switch; status is UNVERIFIED when a sampled inequality fails

    Raises:
        SearchFailure: If no renormalization time is accepted
        GeometryTooCoarseError: If p_hat < 1 at every accepted time
    """
    log = LoggerManager()
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    failure: Optional[Exception] = None
    for rt in _candidate_times(iet, spec):
        try:
            result = _assemble(iet, spec, rt)
        except (GeometryTooCoarseError, DegenerateRotationError) as e:
            logger.debug(f"q={rt.q} rejected: {e}")
            failure = e
            continue
        log.log_info(
            f"Switch a={spec.a} b={spec.b} at q={result.q}: n={result.n} m={result.m} "
            f"p_hat={result.p_hat} r={result.r} |A|={result.measure_A:.4f} "
            f"|B|={result.measure_B:.4f}",
            LogTag.SWITCH,
        )
        verify_switch(iet, result, spec.samples, rng)
        return result
    assert failure is not None
    raise failure


def trivial_switch(
    iet: Iet3,
    a: int,
    b: int,
    epsilon: float,
    rng: np.random.Generator,
    samples: int = 1000,
) -> Optional[SwitchResult]:
    """
    The identity switch n = a on the whole space, when T^a and T^b already agree.

    Returns:
        A verified result, or None if T^(a-b) is not epsilon-close to the identity
        on at least 95% of the sampled points
    """
    xs = rng.random(max(samples, 1))
    close = np.abs(iet.apply_array(xs, a) - iet.apply_array(xs, b)) < epsilon
    if close.mean() < SHADOWING_FRACTION:
        return None
    mode = iet.mode
    with mode.context():
        whole = Interval(mode.zero(), mode.one())
    result = SwitchResult(
        a=a,
        b=b,
        epsilon=epsilon,
        n=a,
        m=0,
        r=1,
        L=1,
        p_hat=1,
        rho=0.0,
        shift=0.0,
        t=None,
        q=None,
        J=whole,
        run_tower=None,
        A=IntervalSet([whole]),
        B=IntervalSet(),
        V_len=1.0,
        return_bound=0,
        return_certificate="none",
        trivial=True,
        status=SwitchStatus.VERIFIED,
        diagnostics=[
            CheckResult.at_least(
                "identity_closeness", float(close.mean()), SHADOWING_FRACTION
            )
        ],
    )
    LoggerManager().log_info(f"Trivial switch a={a} b={b}: n={a}", LogTag.SWITCH)
    return result


def sample_A(res: SwitchResult, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points of A."""
    if res.run_tower is not None:
        return sample_intervals(res.run_tower.level_images, k, rng)
    return sample_interval_set(res.A, k, rng)


def _shadowing(
    iet: Iet3, xs: np.ndarray, n: int, target: int, epsilon: float, name: str
) -> CheckResult:
    if xs.size == 0:
        return CheckResult.vacuous(name, "empty set")
    dist = np.abs(iet.apply_array(xs, n) - iet.apply_array(xs, target))
    fraction = float(np.mean(dist < epsilon))
    detail = f"d(T^{n} x, T^{target} x) < {epsilon} on {xs.size} points"
    return CheckResult.at_least(name, fraction, SHADOWING_FRACTION, detail)


def _shadow_chain(iet: Iet3, res: SwitchResult, xs: np.ndarray) -> CheckResult:
    """Consecutive T^m steps along T^(im+a) x stay within |s|."""
    if xs.size == 0 or res.trivial:
        return CheckResult.vacuous("shadow_chain")
    step = 1 if res.a > res.b else -1
    bound = abs(res.shift) * (1 + CHAIN_TOL)
    ok = np.ones(xs.size, dtype=bool)
    previous = iet.apply_array(xs, res.a)
    for _ in range(abs(res.a - res.b)):
        current = iet.apply_array(previous, step * res.m)
        ok &= np.abs(current - previous) <= bound
        previous = current
    return CheckResult.at_least(
        "shadow_chain", float(ok.mean()), SHADOWING_FRACTION, f"step bound {bound:.3g}"
    )


def _kr_windows(
    iet: Iet3,
    res: SwitchResult,
    xs: np.ndarray,
    power: int,
    rng: np.random.Generator,
    name: str,
) -> CheckResult:
    """Worst KR distance between orbit windows from xs and the power joining."""
    if xs.size == 0:
        return CheckResult.vacuous(name, "empty set")
    bound = 2 * res.epsilon + 4 / math.sqrt(res.L)
    worst = 0.0
    for x in xs:
        window = empirical_orbit_joining(iet, float(x), res.n, res.L)
        reference = sample_power_joining(iet, power, res.L, rng)
        worst = max(worst, kr_bound(window, reference).upper)
    detail = f"{xs.size} windows of length {res.L}"
    return CheckResult.at_most(name, worst, bound, detail)


def verify_switch(
    iet: Iet3,
    res: SwitchResult,
    samples: int = VERIFY_SAMPLES,
    rng: Optional[np.random.Generator] = None,
) -> List[CheckResult]:
    """
    Re-check the conclusions of the switch on fresh samples.

    The result's diagnostics and status are replaced by the outcome. With
    samples = 0 nothing is checked and the switch counts as verified.

    Args:
        iet: The exchange
        res: Result of build_switch
        samples: Points drawn from each of A and B
        rng: Sample generator

    Returns:
        The checks, in a fixed order
    """
    rng = rng if rng is not None else np.random.default_rng()
    checks: List[CheckResult] = []
    if samples > 0 and res.trivial:
        xs = rng.random(samples)
        checks.append(
            _shadowing(iet, xs, res.n, res.b, res.epsilon, "identity_closeness")
        )
    elif samples > 0:
        xs_a = sample_A(res, samples, rng)
        xs_b = sample_interval_set(res.B, samples, rng)
        half = 0.5 - res.epsilon
        checks.extend(
            [
                _shadowing(iet, xs_a, res.n, res.a, res.epsilon, "shadowing_A"),
                _shadowing(iet, xs_b, res.n, res.b, res.epsilon, "shadowing_B"),
                CheckResult.at_least("measure_A", res.measure_A, half),
                CheckResult.at_least("measure_B", res.measure_B, half),
                CheckResult.at_least(
                    "return_time",
                    res.return_bound,
                    1.5 * res.r,
                    f"certified by {res.return_certificate}",
                ),
                _shadow_chain(iet, res, xs_a[: min(samples, 1000)]),
                _kr_windows(iet, res, xs_a[:KR_SAMPLES], res.a, rng, "kr_A"),
                _kr_windows(iet, res, xs_b[:KR_SAMPLES], res.b, rng, "kr_B"),
            ]
        )
    res.diagnostics = checks
    verified = all(c.passed for c in checks)
    res.status = SwitchStatus.VERIFIED if verified else SwitchStatus.UNVERIFIED
    log = LoggerManager()
    for check in checks:
        log.log_check(LogTag.SWITCH, check.name, check.passed, check.margin)
    return checks
