"""
Approximation of a joining's disintegration by non-negative combinations of powers.

For an atom (x, y) with x on level j and y on level k of a tower of height n, the
atom is attributed to the power i = (k - j) mod n. Coefficients are read off the
conditional measure of one base bin and then compared against the operator
f -> E[f(y) | x] on every bin.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from iet_core import Iet3
from towers import Tower, level_indices

from .disintegration import DEFAULT_BINS, Disintegration, apply_Asigma, disintegrate
from .kr import KRResult, kr_bound
from .measures import DiscreteMeasure2D, sample_power_joining
from .test_functions import TEST_FUNCTIONS_VERSION, TestFunction, test_function_family

logger = logging.getLogger(__name__)

COEFFICIENT_TOL = 1e-12


@dataclass
class CoefficientVector:
    """
    Non-negative coefficients c_i of the powers T^i, i < height.

    Attributes:
        height: Height of the tower the indices refer to
        coefficients: Sparse map from power index to coefficient
        base_bin: Bin whose conditional measure produced the coefficients
    """

    height: int
    coefficients: Dict[int, float]
    base_bin: int

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.coefficients.values()):
            raise ValueError("Coefficients must be non-negative")
        if self.total > 1 + COEFFICIENT_TOL:
            raise ValueError(f"Coefficients sum to {self.total} > 1")

    @property
    def total(self) -> float:
        return float(sum(self.coefficients.values()))

    def get(self, i: int) -> float:
        return self.coefficients.get(i, 0.0)

    def dominant(self) -> Tuple[int, float]:
        if not self.coefficients:
            return 0, 0.0
        i = max(sorted(self.coefficients), key=lambda k: self.coefficients[k])
        return i, self.coefficients[i]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.height)
        for i, c in self.coefficients.items():
            dense[i] = c
        return dense

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "base_bin": self.base_bin,
            "total": self.total,
            "coefficients": {str(i): c for i, c in sorted(self.coefficients.items())},
        }


@dataclass
class ApproximationResult:
    """
    Output of approx_by_powers.

    Attributes:
        coefficients: Coefficient vector read at the base bin
        l2_errors: Per test function, the mass-weighted L^2 error over the x-bins
        outside_mass: Per bin, conditional mass of atoms with x or y off the tower
        bins: Bin count of the disintegration
        bin_coefficients: Per non-empty bin, its own sparse coefficient map
    """

    coefficients: CoefficientVector
    l2_errors: Dict[str, float]
    outside_mass: np.ndarray
    bins: int
    bin_coefficients: Dict[int, Dict[int, float]] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coefficients.to_dict(),
            "l2_errors": self.l2_errors,
            "bins": self.bins,
            "test_functions": TEST_FUNCTIONS_VERSION,
            "base_outside_mass": float(self.outside_mass[self.coefficients.base_bin]),
        }


def _l1(p: Dict[int, float], q: Dict[int, float]) -> float:
    return sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in set(p) | set(q))


def _bin_coefficients(
    d: Disintegration, tower: Tower
) -> Tuple[Dict[int, Dict[int, float]], np.ndarray]:
    """Sparse per-bin coefficient maps and per-bin outside mass."""
    n = tower.height
    coefficients: Dict[int, Dict[int, float]] = {}
    outside = np.zeros(d.bins)
    for b in range(d.bins):
        if d.masses[b] <= 0:
            continue
        jx = level_indices(tower, d.xs[b])
        jy = level_indices(tower, d.ys[b])
        regular = (jx >= 0) & (jy >= 0)
        outside[b] = float(d.ws[b][~regular].sum())
        shifts = np.mod(jy[regular] - jx[regular], n)
        sums = np.bincount(shifts, weights=d.ws[b][regular], minlength=1)
        coefficients[b] = {int(i): float(c) for i, c in enumerate(sums) if c > 0}
    return coefficients, outside


def _choose_base_bin(
    coefficients: Dict[int, Dict[int, float]], in_tower: np.ndarray
) -> int:
    """Bin whose coefficients agree best with its non-empty neighbours."""
    best, best_score = -1, np.inf
    for b in sorted(coefficients):
        if not in_tower[b]:
            continue
        neighbours = [coefficients[k] for k in (b - 1, b + 1) if k in coefficients]
        if not neighbours:
            continue
        score = sum(_l1(coefficients[b], c) for c in neighbours) / len(neighbours)
        if score < best_score:
            best, best_score = b, score
    if best < 0:
        candidates = [b for b in sorted(coefficients) if in_tower[b]]
        if not candidates:
            raise ValueError("No bin of the disintegration lies on the tower")
        best = candidates[0]
    return best


def combine_powers(
    iet: Iet3, coefficients: CoefficientVector, f: TestFunction, xs: np.ndarray
) -> np.ndarray:
    """Evaluate sum_i c_i f(T^i x) at each x."""
    total = np.zeros_like(xs, dtype=float)
    ys, reached = np.asarray(xs, dtype=float), 0
    for i, c in sorted(coefficients.coefficients.items()):
        ys, reached = iet.apply_array(ys, i - reached), i
        total += c * f(ys)
    return total


def approx_by_powers(
    iet: Iet3,
    m: DiscreteMeasure2D,
    tower: Tower,
    bins: int = DEFAULT_BINS,
    functions: Optional[Sequence[TestFunction]] = None,
) -> ApproximationResult:
    """
    Read power coefficients off the disintegration and measure the fit.

    Args:
        iet: The exchange the tower was built for
        m: The joining, as atoms
        tower: A certified tower of iet
        bins: Number of x-bins
        functions: Test functions; the versioned family by default

    Returns:
        ApproximationResult with the base-bin coefficients and L^2 errors

    Raises:
        ValueError: If no bin of the disintegration lies on the tower
    """
    functions = list(functions) if functions is not None else test_function_family()
    d = disintegrate(m, bins)
    coefficients, outside = _bin_coefficients(d, tower)
    xbar = d.representative_x()
    in_tower = level_indices(tower, xbar) >= 0
    base = _choose_base_bin(coefficients, in_tower)
    vector = CoefficientVector(tower.height, dict(coefficients[base]), base)

    nonempty = ~d.empty
    weights = d.masses[nonempty] / d.masses[nonempty].sum()
    errors: Dict[str, float] = {}
    for f in functions:
        observed = apply_Asigma(d, f)[nonempty]
        predicted = combine_powers(iet, vector, f, xbar[nonempty])
        errors[f.name] = float(np.sqrt(np.dot(weights, (observed - predicted) ** 2)))

    logger.info(
        f"Base bin {base}: {len(vector.coefficients)} powers, "
        f"total {vector.total:.6f}, "
        f"outside mass {outside[base]:.3g}"
    )
    return ApproximationResult(vector, errors, outside, bins, coefficients)


@dataclass
class StabilityCheck:
    """
    Agreement of coefficients at the base bin and at the bin of T^i x.

    Attributes:
        shift: The power i
        target_bin: Bin holding T^i of the base representative
        l1_difference: sum_j |c_j(x) - c_j(T^i x)|
        bound: 2 * max outside mass of the two bins + 4 / bins
    """

    shift: int
    target_bin: int
    l1_difference: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.l1_difference <= self.bound

    def to_dict(self) -> dict:
        return {
            "shift": self.shift,
            "target_bin": self.target_bin,
            "l1_difference": self.l1_difference,
            "bound": self.bound,
            "holds": self.holds,
        }


def coefficient_stability(
    iet: Iet3, result: ApproximationResult, shifts: Sequence[int], xbar: float
) -> List[StabilityCheck]:
    """
    Compare the base coefficients with those at T^i of the base point.

    Shifts that land in an empty bin are skipped.

    Args:
        iet: The exchange
        result: Output of approx_by_powers
        shifts: Powers i to test
        xbar: The base bin's representative point
    """
    base = result.coefficients.base_bin
    checks = []
    for i in shifts:
        y = float(iet.apply_pow(i, xbar))
        target = min(int(y * result.bins), result.bins - 1)
        if target not in result.bin_coefficients:
            continue
        diff = _l1(result.bin_coefficients[base], result.bin_coefficients[target])
        out = max(result.outside_mass[base], result.outside_mass[target])
        checks.append(StabilityCheck(i, target, diff, 2 * out + 4 / result.bins))
    return checks


@dataclass
class LevelOutsideMass:
    """
    Per-level mean conditional mass that leaves the tower.

    Attributes:
        per_level: For each level, the mass fraction of its atoms with y off the tower
        total_outside: Joint mass of atoms with x on the tower and y off it
        level_width: Measure of one level
    """

    per_level: np.ndarray
    total_outside: float
    level_width: float

    @property
    def surrogate(self) -> float:
        """n * width * mean over levels; total_outside for a uniform x-marginal."""
        return float(len(self.per_level) * self.level_width * np.mean(self.per_level))


def level_outside_mass(m: DiscreteMeasure2D, tower: Tower) -> LevelOutsideMass:
    """Outside-mass profile along the levels of a tower."""
    jx = level_indices(tower, m.xs)
    jy = level_indices(tower, m.ys)
    on = jx >= 0
    leaving = on & (jy < 0)
    mass = np.bincount(jx[on], weights=m.ws[on], minlength=tower.height)
    lost = np.bincount(jx[leaving], weights=m.ws[leaving], minlength=tower.height)
    per_level = np.divide(lost, mass, out=np.zeros_like(lost), where=mass > 0)
    return LevelOutsideMass(per_level, float(m.ws[leaving].sum()), tower.width)


def apportion(coefficients: CoefficientVector, d: int) -> List[int]:
    """Split d slots among the powers by largest remainder of d * c_i / sum c."""
    if d < 1:
        raise ValueError("Need at least one exponent")
    items = sorted(coefficients.coefficients.items())
    if not items:
        return [0] * d
    total = sum(c for _, c in items)
    quotas = [(i, d * c / total) for i, c in items]
    counts = {i: int(np.floor(q)) for i, q in quotas}
    remaining = d - sum(counts.values())
    by_remainder = sorted(quotas, key=lambda iq: (-(iq[1] - np.floor(iq[1])), iq[0]))
    for i, _ in by_remainder[:remaining]:
        counts[i] += 1
    return [i for i, _ in items for _ in range(counts[i])]


@dataclass
class PowerMixture:
    """
    Equal mixture of d power joinings fitted to a measure.

    Attributes:
        exponents: The d exponents, with repetition
        kr: KR distance between the mixture and the measure
    """

    exponents: List[int]
    kr: KRResult

    def to_dict(self) -> dict:
        return {"exponents": self.exponents, "kr": self.kr.to_dict()}


def fit_power_mixture(
    iet: Iet3,
    measure: DiscreteMeasure2D,
    tower: Tower,
    d: int,
    rng: np.random.Generator,
    bins: int = DEFAULT_BINS,
    n_atoms: Optional[int] = None,
) -> PowerMixture:
    """
    Round the power coefficients of a measure to d equally weighted exponents.

    Args:
        iet: The exchange
        measure: Target joining
        tower: Tower used to read coefficients
        d: Number of exponents
        rng: Generator for the mixture's samples
        bins: Disintegration bins
        n_atoms: Atoms per power joining; the target's atom count by default
    """
    result = approx_by_powers(iet, measure, tower, bins, functions=[])
    exponents = apportion(result.coefficients, d)
    n_atoms = n_atoms or measure.n_atoms
    mixture = DiscreteMeasure2D.mixture(
        [sample_power_joining(iet, e, n_atoms, rng) for e in exponents]
    )
    kr = kr_bound(mixture, measure)
    logger.info(f"Power mixture {exponents}: KR {kr.value:.4g} ({kr.method})")
    return PowerMixture(exponents, kr)
