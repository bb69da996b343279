"""Marked flat tori, the diagonal flow g_t and reduction to a fundamental domain."""

import logging
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import product
from typing import Iterator, Tuple

import numpy as np

from iet_core import Iet3, NoAdjustmentError, RangeError

logger = logging.getLogger(__name__)

PRECISION = 50
MAX_FLOW_TIME = 500

Vector = Tuple[Decimal, Decimal]

# columns of the eight signed permutation matrices
SQUARE_SYMMETRIES = tuple(
    (cols[0], cols[1])
    for cols in (
        ((su, 0), (0, sv)) if swap == 0 else ((0, su), (sv, 0))
        for swap in (0, 1)
        for su in (1, -1)
        for sv in (1, -1)
    )
)


def _dec(value) -> Decimal:
    if isinstance(value, Fraction):
        return Decimal(value.numerator) / Decimal(value.denominator)
    return Decimal(value)


def _dot(p: Vector, q: Vector) -> Decimal:
    return p[0] * q[0] + p[1] * q[1]


def _sub(p: Vector, q: Vector, k: int = 1) -> Vector:
    return (p[0] - k * q[0], p[1] - k * q[1])


@dataclass(frozen=True)
class MarkedTorus:
    """
    Unit-area lattice with an offset between two marked points.

    Attributes:
        u: First lattice generator (column)
        v: Second lattice generator (column)
        marked: Offset of the second marked point from the first
    """

    u: Vector
    v: Vector
    marked: Vector

    @classmethod
    def from_basis(cls, basis, marked) -> "MarkedTorus":
        """Build from a 2x2 array whose columns generate the lattice."""
        with localcontext() as ctx:
            ctx.prec = PRECISION
            b = [[_dec(basis[i][j]) for j in range(2)] for i in range(2)]
            return cls(
                (b[0][0], b[1][0]),
                (b[0][1], b[1][1]),
                (_dec(marked[0]), _dec(marked[1])),
            )

    @property
    def basis(self) -> np.ndarray:
        return np.array(
            [[float(self.u[0]), float(self.v[0])], [float(self.u[1]), float(self.v[1])]]
        )

    @property
    def det(self) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = PRECISION
            return self.u[0] * self.v[1] - self.u[1] * self.v[0]

    def lattice_vector(self, k: int, j: int) -> Vector:
        with localcontext() as ctx:
            ctx.prec = PRECISION
            return (k * self.u[0] + j * self.v[0], k * self.u[1] + j * self.v[1])

    def coordinates(self, point: Vector) -> Tuple[Decimal, Decimal]:
        """Real coefficients (c1, c2) with point = c1*u + c2*v."""
        with localcontext() as ctx:
            ctx.prec = PRECISION
            det = self.det
            c1 = (point[0] * self.v[1] - point[1] * self.v[0]) / det
            c2 = (self.u[0] * point[1] - self.u[1] * point[0]) / det
            return c1, c2

    def nearby_lattice_vectors(
        self, point: Vector, radius: int = 2
    ) -> Iterator[Vector]:
        """Lattice vectors whose coefficients are within radius of those of point."""
        c1, c2 = self.coordinates(point)
        k0, j0 = int(c1.to_integral_value()), int(c2.to_integral_value())
        for dk, dj in product(range(-radius, radius + 1), repeat=2):
            yield self.lattice_vector(k0 + dk, j0 + dj)

    def to_dict(self) -> dict:
        return {
            "basis": [[float(x) for x in row] for row in self.basis],
            "marked": [float(self.marked[0]), float(self.marked[1])],
        }


def torus_of_iet(iet: Iet3) -> MarkedTorus:
    """Lattice [[1, -alpha], [0, 1]] Z^2 with marked offset (kappa, 0)."""
    alpha, kappa = iet.exact_rotation()
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return MarkedTorus(
            (Decimal(1), Decimal(0)),
            (-_dec(alpha), Decimal(1)),
            (_dec(kappa), Decimal(0)),
        )


def apply_scale(torus: MarkedTorus, factor) -> MarkedTorus:
    """diag(factor, 1/factor) applied to basis and marked offset."""
    with localcontext() as ctx:
        ctx.prec = PRECISION
        e = _dec(factor)
        inv = 1 / e
        return MarkedTorus(
            (torus.u[0] * e, torus.u[1] * inv),
            (torus.v[0] * e, torus.v[1] * inv),
            (torus.marked[0] * e, torus.marked[1] * inv),
        )


def apply_gt(torus: MarkedTorus, t) -> MarkedTorus:
    """
    The diagonal flow g_t = diag(e^t, e^-t).

    Raises:
        RangeError: If |t| exceeds the representable flow time
    """
    with localcontext() as ctx:
        ctx.prec = PRECISION
        t = _dec(t)
        if abs(t) > MAX_FLOW_TIME:
            raise RangeError(f"Flow time {t} exceeds {MAX_FLOW_TIME}")
        return apply_scale(torus, t.exp())


def reduce(torus: MarkedTorus) -> MarkedTorus:
    """
    Lagrange-Gauss reduce the basis, orient it, and move the marked offset into
    the fundamental parallelogram.
    """
    with localcontext() as ctx:
        ctx.prec = PRECISION
        u, v = torus.u, torus.v
        while True:
            if _dot(v, v) < _dot(u, u):
                u, v = v, u
            mu = int((_dot(u, v) / _dot(u, u)).to_integral_value())
            if mu == 0:
                break
            v = _sub(v, u, mu)
        if u[0] * v[1] - u[1] * v[0] < 0:
            v = (-v[0], -v[1])
        reduced = MarkedTorus(u, v, torus.marked)
        c1, c2 = reduced.coordinates(torus.marked)
        c1 -= math.floor(c1)
        c2 -= math.floor(c2)
        marked = (c1 * u[0] + c2 * v[0], c1 * u[1] + c2 * v[1])
        return MarkedTorus(u, v, marked)


def _basis_distance(torus: MarkedTorus) -> Decimal:
    best = None
    for cu, cv in SQUARE_SYMMETRIES:
        gap = max(
            abs(torus.u[0] - cu[0]),
            abs(torus.u[1] - cu[1]),
            abs(torus.v[0] - cv[0]),
            abs(torus.v[1] - cv[1]),
        )
        best = gap if best is None else min(best, gap)
    return best


def _marked_distance(torus: MarkedTorus) -> Decimal:
    best = None
    for target in ((Decimal("0.5"), Decimal(0)), (Decimal("-0.5"), Decimal(0))):
        diff = _sub(torus.marked, target)
        for vec in torus.nearby_lattice_vectors(diff, radius=1):
            d = _sub(diff, vec)
            dist = _dot(d, d).sqrt()
            best = dist if best is None else min(best, dist)
    return best


def dist_to_hat(torus: MarkedTorus) -> float:
    """
    Distance to the square torus with marked points 1/2 apart horizontally.

    Maximum of the entrywise distance of the reduced basis to the nearest signed
    permutation matrix and the distance of the marked offset to (+-1/2, 0) modulo
    the lattice.
    """
    with localcontext() as ctx:
        ctx.prec = PRECISION
        reduced = reduce(torus)
        return float(max(_basis_distance(reduced), _marked_distance(reduced)))


def closest_lattice_vector(torus: MarkedTorus, point: Vector) -> Vector:
    """Lattice vector nearest to point (searched around the reduced basis)."""
    with localcontext() as ctx:
        ctx.prec = PRECISION
        reduced = reduce(torus)
        best, best_norm = None, None
        for vec in reduced.nearby_lattice_vectors(point, radius=2):
            d = _sub(point, vec)
            norm = _dot(d, d)
            if best_norm is None or norm < best_norm:
                best, best_norm = vec, norm
        return best


def vertical_return_offset(torus: MarkedTorus) -> Tuple[Decimal, Decimal, Decimal]:
    """
    Offset (v1, v2) of the time-1 vertical flow modulo the lattice, and the
    section adjustment s = -ln(1 - v2).

    The torus flowed by g_{-s} has a lattice vector with vertical component
    exactly 1.

    Raises:
        NoAdjustmentError: If v2 >= 1
    """
    with localcontext() as ctx:
        ctx.prec = PRECISION
        up = (Decimal(0), Decimal(1))
        v1, v2 = _sub(up, closest_lattice_vector(torus, up))
        if v2 >= 1:
            raise NoAdjustmentError(f"Vertical offset v2={v2} admits no adjustment")
        s_adjust = -((1 - v2).ln())
        return v1, v2, s_adjust
