"""Symmetric three-interval exchange transformations."""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arithmetic import ArithmeticMode, Number
from .errors import DomainError, InvalidParametersError
from .rotation import rotation_jump, visit_count

logger = logging.getLogger(__name__)

# powers above this size go through the rotation jump instead of stepping
FAST_POWER_THRESHOLD = 256


@dataclass(frozen=True)
class RotationRep:
    """
    Rotation picture of a 3-IET: T is the rescaled first return of x -> x + alpha
    to K = [0, kappa).

    Attributes:
        alpha: Rotation number in (0, 1)
        kappa: Length of the inducing interval K
    """

    alpha: Number
    kappa: Number

    def __post_init__(self) -> None:
        if not (0 < self.alpha < 1) or not (0 < self.kappa <= 1):
            raise InvalidParametersError(
                "Rotation parameters out of range: "
                f"alpha={self.alpha}, kappa={self.kappa}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {"alpha": float(self.alpha), "kappa": float(self.kappa)}


@dataclass(frozen=True)
class Iet3:
    """
    Interval exchange of [0,1) with permutation (3 2 1).

    Branch boundaries belong to the right branch; lengths sum to one.

    Attributes:
        l1: Length of the first interval
        l2: Length of the second interval
        l3: Length of the third interval
        mode: Arithmetic used for all evaluations
    """

    l1: Number
    l2: Number
    l3: Number
    mode: ArithmeticMode = field(default_factory=ArithmeticMode.binary64)

    def __post_init__(self) -> None:
        if min(self.l1, self.l2, self.l3) < 0:
            raise InvalidParametersError("IET lengths must be non-negative")
        total = self.l1 + self.l2 + self.l3
        if abs(total - 1) > max(self.mode.tolerance, 0):
            raise InvalidParametersError(f"IET lengths must sum to 1, got {total}")

    @classmethod
    def from_lengths(
        cls, lengths: Sequence[Any], mode: Optional[ArithmeticMode] = None
    ) -> "Iet3":
        """
        Build a normalized IET from three non-negative lengths.

        Args:
            lengths: Three numbers or decimal strings
            mode: Arithmetic mode (binary64 by default)

        Returns:
            The normalized Iet3

        Raises:
            InvalidParametersError: On negative lengths or a zero total
        """
        mode = mode or ArithmeticMode.binary64()
        if len(lengths) != 3:
            raise InvalidParametersError(f"Expected 3 lengths, got {len(lengths)}")
        with mode.context():
            a, b, c = (mode.coerce(v) for v in lengths)
            if min(a, b, c) < 0:
                raise InvalidParametersError("IET lengths must be non-negative")
            total = a + b + c
            if total <= 0:
                raise InvalidParametersError("IET lengths must not all vanish")
            l1 = a / total
            l2 = b / total
            l3 = mode.one() - l1 - l2
            if l3 < 0:
                l3 = mode.zero()
        return cls(l1, l2, l3, mode)

    @property
    def discontinuities(self) -> Tuple[Number, Number]:
        return self.l1, self.l1 + self.l2

    @property
    def shifts(self) -> Tuple[Number, Number, Number]:
        """Translation amounts of the three branches."""
        return self.l2 + self.l3, self.l3 - self.l1, -(self.l1 + self.l2)

    def branch(self, x: Number) -> int:
        """Index 0, 1 or 2 of the branch containing x."""
        if x < self.l1:
            return 0
        if x < self.l1 + self.l2:
            return 1
        return 2

    def inverse(self) -> "Iet3":
        """T^{-1}, which is the symmetric IET with lengths (l3, l2, l1)."""
        return Iet3(self.l3, self.l2, self.l1, self.mode)

    def check_point(self, x: Number) -> Number:
        x = self.mode.coerce(x)
        if not (0 <= x < 1):
            raise DomainError(f"Point {x} outside [0,1)")
        return x

    def apply(self, x: Any) -> Number:
        """
        One step of T.

        Raises:
            DomainError: If x is outside [0,1)
        """
        x = self.check_point(x)
        with self.mode.context():
            return self.mode.clamp_unit(x + self.shifts[self.branch(x)])

    def apply_pow(self, n: int, x: Any) -> Number:
        """
        T^n x for any integer n; negative n uses the inverse exchange.

        Large |n| is evaluated exactly through the rotation picture.
        """
        x = self.check_point(x)
        if n == 0:
            return x
        if n < 0:
            return self.inverse().apply_pow(-n, x)
        if n > FAST_POWER_THRESHOLD:
            return self._rotation_power(n, x)
        with self.mode.context():
            s = self.shifts
            d1, d2 = self.discontinuities
            for _ in range(n):
                if x < d1:
                    x = x + s[0]
                elif x < d2:
                    x = x + s[1]
                else:
                    x = x + s[2]
                x = self.mode.clamp_unit(x)
        return x

    def exact_rotation(self) -> Tuple[Fraction, Fraction]:
        """(alpha, kappa) as exact rationals of the stored lengths."""
        l1, l2, l3 = (Fraction(v) for v in (self.l1, self.l2, self.l3))
        total = l1 + 2 * l2 + l3
        return (l2 + l3) / total, (l1 + l2 + l3) / total

    def _rotation_power(self, n: int, x: Number) -> Number:
        alpha, kappa = self.exact_rotation()
        y = rotation_jump(alpha, kappa, kappa * Fraction(x), n) / kappa
        with self.mode.context():
            return self.mode.clamp_unit(self.mode.coerce(y))

    def apply_array(self, xs: np.ndarray, n: int = 1) -> np.ndarray:
        """
        Vectorized T^n in binary64, whatever the mode of the IET.

        Args:
            xs: Points in [0,1)
            n: Power, any integer

        Returns:
            Array of images
        """
        xs = np.asarray(xs, dtype=float)
        if n == 0:
            return xs.copy()
        if n < 0:
            return self.inverse().apply_array(xs, -n)
        if n > 50 * FAST_POWER_THRESHOLD:
            return np.array([float(self.apply_pow(n, float(v))) for v in xs])
        l1, l2, l3 = float(self.l1), float(self.l2), float(self.l3)
        d1, d2 = l1, l1 + l2
        s1, s2, s3 = l2 + l3, l3 - l1, -(l1 + l2)
        top = math.nextafter(1.0, 0.0)
        ys = xs
        for _ in range(n):
            ys = np.where(ys < d1, ys + s1, np.where(ys < d2, ys + s2, ys + s3))
            np.clip(ys, 0.0, top, out=ys)
        return ys

    def orbit(self, x: Any, length: int) -> "OrbitSegment":
        """Orbit segment x, Tx, ..., T^{length-1}x."""
        x = self.check_point(x)
        points: List[Number] = []
        for _ in range(max(length, 0)):
            points.append(x)
            x = self.apply(x)
        start = points[0] if points else x
        return OrbitSegment(start=start, length=len(points), points=points)

    def to_rotation(self) -> RotationRep:
        """alpha = (l2+l3)/(l1+2 l2+l3), kappa = 1/(l1+2 l2+l3)."""
        with self.mode.context():
            total = self.l1 + 2 * self.l2 + self.l3
            return RotationRep((self.l2 + self.l3) / total, self.mode.one() / total)

    @classmethod
    def from_rotation(
        cls, rep: RotationRep, mode: Optional[ArithmeticMode] = None
    ) -> "Iet3":
        """
        Inverse of to_rotation.

        Raises:
            InvalidParametersError: Unless alpha + kappa > 1, kappa > alpha, kappa <= 1
        """
        mode = mode or ArithmeticMode.binary64()
        with mode.context():
            alpha, kappa = mode.coerce(rep.alpha), mode.coerce(rep.kappa)
            if not (alpha + kappa > 1 and kappa > alpha and kappa <= 1):
                raise InvalidParametersError(
                    "Need alpha+kappa>1, kappa>alpha, kappa<=1 "
                    f"(alpha={alpha}, kappa={kappa})"
                )
            one = mode.one()
            lengths = (
                (kappa - alpha) / kappa,
                (one - kappa) / kappa,
                (alpha + kappa - one) / kappa,
            )
        return cls.from_lengths(lengths, mode)

    def to_dict(self) -> Dict[str, Any]:
        """JSON form with 17 significant digits."""
        return {
            name: float(f"{float(getattr(self, name)):.17g}")
            for name in ("l1", "l2", "l3")
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(
        cls, data: Dict[str, Any], mode: Optional[ArithmeticMode] = None
    ) -> "Iet3":
        return cls.from_lengths([data["l1"], data["l2"], data["l3"]], mode)


@dataclass
class OrbitSegment:
    """
    Consecutive points of a forward orbit.

    Attributes:
        start: First point
        length: Number of points
        points: The orbit, points[i+1] = T(points[i])
    """

    start: Number
    length: int
    points: List[Number]

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.points])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "start": float(self.start),
            "length": self.length,
            "points": [float(f"{float(p):.17g}") for p in self.points],
        }


def psi_count(rep: RotationRep, x: Any, steps: int) -> int:
    """
    Number of l in {0, ..., steps-1} with R_alpha^l x in [0, kappa).

    Raises:
        DomainError: If x is outside [0,1)
    """
    if not (0 <= x < 1):
        raise DomainError(f"Point {x} outside [0,1)")
    if steps <= 0:
        return 0
    return visit_count(Fraction(rep.alpha), Fraction(rep.kappa), Fraction(x), 0, steps)


def rotate(rep: RotationRep, x: Any, steps: int) -> Fraction:
    """R_alpha^steps x, exact on the rational values of the inputs."""
    y = Fraction(x) + steps * Fraction(rep.alpha)
    return y - math.floor(y)
