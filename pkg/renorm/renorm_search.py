"""Renormalization times near the square marked torus and their crossing data."""

import logging
import math
from dataclasses import asdict, dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from iet_core import (
    DegenerateRotationError,
    DomainError,
    Iet3,
    Interval,
    RotationRep,
    IntervalSet,
    NoAdjustmentError,
    denominators,
    visit_count,
)

from .marked_torus import (
    PRECISION,
    MarkedTorus,
    apply_gt,
    apply_scale,
    dist_to_hat,
    torus_of_iet,
    vertical_return_offset,
)

logger = logging.getLogger(__name__)

SECTION_TOL = 1e-9
RHO_FLOOR = 1e-12
GRID_STEP = 0.01


@dataclass
class CrossingSegment:
    """
    Maximal piece of [0, kappa) on which the crossing count is constant.

    Attributes:
        start: Left end in rotation coordinates
        end: Right end in rotation coordinates
        count: Number of returns to K among rotation times 1..q
        regular: Whether x + eta stays in K on the whole piece
    """

    start: Fraction
    end: Fraction
    count: int
    regular: bool

    @property
    def length(self) -> Fraction:
        return self.end - self.start


@dataclass
class CrossingProfile:
    """
    Exact crossing-count function at an integer renormalization scale q.

    For x in a regular piece with count c, T^c u = u + shift where u = x / kappa.

    Attributes:
        q: Rotation time e^t
        alpha: Rotation number
        kappa: Length of K
        eta: Signed displacement q*alpha - p
        segments: Pieces covering [0, kappa) in order
    """

    q: int
    alpha: Fraction
    kappa: Fraction
    eta: Fraction
    segments: List[CrossingSegment]

    @property
    def shift(self) -> Fraction:
        """Displacement of T^c on regular pieces, in IET coordinates."""
        return self.eta / self.kappa

    def mass_by_count(self) -> Dict[int, float]:
        """IET mass carried by each count value."""
        masses: Dict[int, float] = {}
        for seg in self.segments:
            mass = float(seg.length / self.kappa)
            masses[seg.count] = masses.get(seg.count, 0.0) + mass
        return masses

    def dominant_count(self) -> int:
        """Lower value of the consecutive pair (c, c+1) carrying the most mass."""
        masses = self.mass_by_count()
        return max(masses, key=lambda c: (masses[c] + masses.get(c + 1, 0.0), -c))

    def region(
        self, count: int, regular_only: bool = True
    ) -> List[Tuple[Fraction, Fraction]]:
        """Pieces with the given count, in IET coordinates."""
        return [
            (seg.start / self.kappa, seg.end / self.kappa)
            for seg in self.segments
            if seg.count == count and (seg.regular or not regular_only)
        ]

    def region_set(
        self, iet: Iet3, count: int, regular_only: bool = True
    ) -> IntervalSet:
        """Union of the pieces; contiguous pieces merge and lose their cuts."""
        mode = iet.mode
        with mode.context():
            pieces = [
                Interval(mode.coerce(a), mode.coerce(b))
                for a, b in self.region(count, regular_only)
            ]
            return IntervalSet(pieces, mode.tolerance)

    def counts_at(self, xs: np.ndarray) -> np.ndarray:
        """Crossing counts at rotation-coordinate points in [0, kappa)."""
        starts = np.array([float(seg.start) for seg in self.segments])
        counts = np.array([seg.count for seg in self.segments])
        pos = np.searchsorted(starts, np.asarray(xs, dtype=float), side="right")
        idx = np.clip(pos - 1, 0, None)
        return counts[idx]


@dataclass
class RenormTime:
    """
    Accepted renormalization time in the section near the square torus.

    Attributes:
        t: Flow time, ln q
        q: Integer scale e^t
        dist_hat: Distance of g_t omega_T to the square marked torus
        in_S: Section membership
        v_offset: Vertical return offset (v1, v2)
        m: Dominant crossing count
        rho: Horizontal displacement of the time-1 vertical return
        V_len: IET mass of the count-m regular region
        eta: Signed rotation displacement q*alpha - p
        shift: eta / kappa, the displacement of T^m in IET coordinates
    """

    t: float
    q: int
    dist_hat: float
    in_S: bool
    v_offset: Tuple[float, float]
    m: int
    rho: float
    V_len: float
    eta: float
    shift: float

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["v_offset"] = list(self.v_offset)
        return data


@dataclass
class RenormCandidate:
    """One scanned time with the outcome of every test."""

    t_raw: float
    t: Optional[float]
    q: Optional[int]
    dist_hat: Optional[float] = None
    in_S: bool = False
    rho: Optional[float] = None
    accepted: bool = False
    reason: str = ""
    v_offset: Tuple[float, float] = field(default=(0.0, 0.0))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["v_offset"] = list(self.v_offset)
        return data


def crossing_profile(iet: Iet3, q: int) -> CrossingProfile:
    """
    Sweep the 2q boundary points of the arcs {x : x + h*alpha in K}, h = 1..q.

    Args:
        iet: The exchange
        q: Rotation time (>= 1)

    Returns:
        The exact piecewise constant profile on [0, kappa)
    """
    if q < 1:
        raise ValueError(f"Profile scale must be positive, got {q}")
    alpha, kappa = iet.exact_rotation()
    eta = q * alpha - round(q * alpha)
    events: Dict[Fraction, int] = {}
    for h in range(1, q + 1):
        enter = -h * alpha
        enter -= math.floor(enter)
        leave = kappa - h * alpha
        leave -= math.floor(leave)
        events[enter] = events.get(enter, 0) + 1
        events[leave] = events.get(leave, 0) - 1
    cut = kappa - eta if eta > 0 else -eta
    if 0 < cut < kappa:
        events.setdefault(cut, 0)

    running = visit_count(alpha, kappa, Fraction(0), 1, q + 1)
    cursor = Fraction(0)
    segments: List[CrossingSegment] = []
    for pos in sorted(p for p in events if 0 < p < kappa):
        segments.append(CrossingSegment(cursor, pos, running, False))
        running += events[pos]
        cursor = pos
    segments.append(CrossingSegment(cursor, kappa, running, False))

    # pieces are never merged: every event is a discontinuity of some T^j, j <= count
    for seg in segments:
        seg.regular = seg.start + eta >= 0 and seg.end + eta <= kappa
    segments = [seg for seg in segments if seg.end > seg.start]
    return CrossingProfile(q, alpha, kappa, eta, segments)


def _heights(t) -> int:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return int(math.floor(Decimal(t).exp() + Decimal("1e-9")))


def crossing_count(iet: Union[Iet3, RotationRep], t: float, x) -> int:
    """
    Crossings of the vertical segment of length e^t from x with the slit K.

    Crossings happen at integer heights 1..floor(e^t), where the segment passes
    through x + h*alpha.

    Raises:
        DomainError: If x is outside [0, kappa)
    """
    if isinstance(iet, RotationRep):
        alpha, kappa = Fraction(iet.alpha), Fraction(iet.kappa)
    else:
        alpha, kappa = iet.exact_rotation()
    x = Fraction(x)
    if not (0 <= x < kappa):
        raise DomainError(f"Point {float(x)} outside K = [0, {float(kappa)})")
    return visit_count(alpha, kappa, x, 1, _heights(t) + 1)


def rho_of_torus(torus: MarkedTorus) -> float:
    """
    Horizontal displacement |v1| of the time-1 vertical return offset.

    Raises:
        DegenerateRotationError: If the displacement vanishes
    """
    v1, _, _ = vertical_return_offset(torus)
    rho = float(abs(v1))
    if rho <= RHO_FLOOR:
        raise DegenerateRotationError("Vertical return is a lattice vector (rho = 0)")
    return rho


def rho_of(iet: Iet3, t: float) -> float:
    """rho on g_t omega_T."""
    return rho_of_torus(apply_gt(torus_of_iet(iet), t))


def _in_section(v1: Decimal, v2: Decimal, section_tol: float) -> bool:
    return abs(v2) <= section_tol and abs(v1) <= Decimal("0.5") + Decimal(section_tol)


def _raw_times(iet: Iet3, t_max: float, grid_step: float) -> List[float]:
    alpha, _ = iet.exact_rotation()
    q_max = int(math.floor(math.exp(t_max) + 1e-9))
    times = [math.log(q) for q in denominators(alpha, q_max)]
    steps = int(math.floor(t_max / grid_step + 1e-9))
    times.extend(k * grid_step for k in range(steps + 1))
    return times


def scan_renorm_candidates(
    iet: Iet3,
    delta: float,
    t_max: float,
    grid_step: float = GRID_STEP,
    section_tol: float = SECTION_TOL,
) -> List[RenormCandidate]:
    """
    Test convergent times and a uniform grid, snapped into the section.

    Every candidate is kept with the reason it was rejected, so a failed search
    explains itself.

    Args:
        iet: The exchange
        delta: Acceptance radius around the square marked torus
        t_max: Largest flow time considered
        grid_step: Spacing of the fallback grid
        section_tol: Tolerance on the vertical offset after adjustment

    Returns:
        Candidates in scan order, one per distinct integer scale
    """
    if delta <= 0 or t_max <= 0:
        raise ValueError("delta and t_max must be positive")
    base = torus_of_iet(iet)
    seen: Dict[int, RenormCandidate] = {}
    candidates: List[RenormCandidate] = []
    for t_raw in _raw_times(iet, t_max, grid_step):
        try:
            _, v2, _ = vertical_return_offset(apply_gt(base, t_raw))
        except NoAdjustmentError:
            candidates.append(
                RenormCandidate(t_raw, None, None, reason="no section adjustment")
            )
            continue
        with localcontext() as ctx:
            ctx.prec = PRECISION
            q = int(((1 - v2) * Decimal(t_raw).exp()).to_integral_value())
        if q < 1:
            candidates.append(
                RenormCandidate(t_raw, None, None, reason="no positive scale")
            )
            continue
        if q in seen:
            continue
        t = math.log(q)
        candidate = RenormCandidate(t_raw, t, q)
        seen[q] = candidate
        candidates.append(candidate)
        if t > t_max + 1e-12:
            candidate.reason = "adjusted time beyond t_max"
            continue
        adjusted = apply_scale(base, q)
        v1a, v2a, _ = vertical_return_offset(adjusted)
        candidate.v_offset = (float(v1a), float(v2a))
        candidate.in_S = _in_section(v1a, v2a, section_tol)
        candidate.rho = float(abs(v1a))
        candidate.dist_hat = dist_to_hat(adjusted)
        if not candidate.in_S:
            candidate.reason = "not in section"
        elif candidate.rho <= RHO_FLOOR:
            candidate.reason = "degenerate rotation (rho = 0)"
        elif candidate.dist_hat >= delta:
            candidate.reason = f"dist_hat {candidate.dist_hat:.4g} >= delta"
        else:
            candidate.accepted = True
            candidate.reason = "accepted"
        logger.debug(f"q={q} t={t:.4f}: {candidate.reason}")
    return candidates


def find_renorm_times(
    iet: Iet3,
    delta: float,
    t_max: float,
    grid_step: float = GRID_STEP,
    section_tol: float = SECTION_TOL,
) -> List[RenormTime]:
    """
    Renormalization times with g_t omega_T within delta of the square marked torus
    and inside the section, with their crossing data.

    An empty list means the search failed; it is not an error.
    """
    accepted: List[RenormTime] = []
    for cand in scan_renorm_candidates(iet, delta, t_max, grid_step, section_tol):
        if cand.accepted:
            accepted.append(
                _with_profile(
                    iet, cand.q, cand.dist_hat, cand.in_S, cand.v_offset, cand.rho
                )
            )
    accepted.sort(key=lambda rt: rt.t)
    logger.info(f"{len(accepted)} renormalization times accepted up to t={t_max}")
    return accepted


def _with_profile(
    iet: Iet3,
    q: int,
    dist_hat: float,
    in_S: bool,
    v_offset: Tuple[float, float],
    rho: float,
) -> RenormTime:
    profile = crossing_profile(iet, q)
    m = profile.dominant_count()
    return RenormTime(
        t=math.log(q),
        q=q,
        dist_hat=dist_hat,
        in_S=in_S,
        v_offset=v_offset,
        m=m,
        rho=rho,
        V_len=sum(float(b - a) for a, b in profile.region(m)),
        eta=float(profile.eta),
        shift=float(profile.shift),
    )


def renorm_time_at(
    iet: Iet3, t: float, section_tol: float = SECTION_TOL
) -> RenormTime:
    """
    Crossing data at a prescribed time, snapped to the integer scale round(e^t).

    No acceptance test is applied; in_S and dist_hat are reported as measured.
    """
    q = max(1, int(round(math.exp(t))))
    adjusted = apply_scale(torus_of_iet(iet), q)
    v1, v2, _ = vertical_return_offset(adjusted)
    in_S = _in_section(v1, v2, section_tol)
    return _with_profile(
        iet,
        q,
        dist_to_hat(adjusted),
        bool(in_S),
        (float(v1), float(v2)),
        float(abs(v1)),
    )
