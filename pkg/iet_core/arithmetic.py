"""Arithmetic modes: exact rationals, binary64 and extended-precision decimals."""

import math
from contextlib import contextmanager, nullcontext
from dataclasses import dataclass
from decimal import Decimal, localcontext
from enum import Enum
from fractions import Fraction
from typing import Any, Iterator, Union

from .errors import ArithmeticModeError

Number = Union[Fraction, float, Decimal]


class ModeTag(Enum):
    """Supported number representations."""

    RATIONAL = "rational"
    BINARY64 = "f64"
    EXTENDED = "f64x"


# one step of a branch translation costs at most this much in binary64
STEP_ERROR_F64 = 4 * 2.0**-53


@dataclass(frozen=True)
class ArithmeticMode:
    """
    Number representation used by an IET and everything computed from it.

    Attributes:
        tag: Which representation is used
        tolerance: Comparison slack for equality checks in this mode
        precision: Decimal digits for the extended mode
    """

    tag: ModeTag = ModeTag.BINARY64
    tolerance: float = 1e-12
    precision: int = 40

    @classmethod
    def rational(cls) -> "ArithmeticMode":
        return cls(ModeTag.RATIONAL, 0.0)

    @classmethod
    def binary64(cls) -> "ArithmeticMode":
        return cls(ModeTag.BINARY64, 1e-12)

    @classmethod
    def extended(cls, precision: int = 40) -> "ArithmeticMode":
        return cls(ModeTag.EXTENDED, 1e-30, precision)

    @classmethod
    def from_name(cls, name: str) -> "ArithmeticMode":
        """
        Build a mode from its CLI name.

        Args:
            name: One of "rational", "f64", "f64x"

        Returns:
            The matching ArithmeticMode

        Raises:
            ArithmeticModeError: If the name is unknown
        """
        try:
            tag = ModeTag(name)
        except ValueError as e:
            raise ArithmeticModeError(f"Unknown arithmetic mode: {name}") from e
        if tag is ModeTag.RATIONAL:
            return cls.rational()
        if tag is ModeTag.EXTENDED:
            return cls.extended()
        return cls.binary64()

    @property
    def is_exact(self) -> bool:
        return self.tag is ModeTag.RATIONAL

    @contextmanager
    def context(self) -> Iterator[None]:
        """Decimal context for the extended mode; a no-op otherwise."""
        if self.tag is ModeTag.EXTENDED:
            with localcontext() as ctx:
                ctx.prec = self.precision
                yield
        else:
            with nullcontext():
                yield

    def coerce(self, value: Any) -> Number:
        """
        Convert a value into this mode's number type.

        Strings are parsed exactly, floats are taken at their exact binary value.

        Raises:
            ArithmeticModeError: If the value is not a finite number
        """
        if isinstance(value, float) and not math.isfinite(value):
            raise ArithmeticModeError(f"Non-finite value: {value}")
        try:
            if self.tag is ModeTag.RATIONAL:
                return Fraction(value)
            if self.tag is ModeTag.BINARY64:
                if isinstance(value, str):
                    return float(Fraction(value))
                return float(value)
            with self.context():
                if isinstance(value, str):
                    value = Fraction(value)
                if isinstance(value, Fraction):
                    return Decimal(value.numerator) / Decimal(value.denominator)
                return +Decimal(value)
        except (ValueError, TypeError, ArithmeticError) as e:
            raise ArithmeticModeError(
                f"Cannot represent {value!r} in {self.tag.value}"
            ) from e

    def zero(self) -> Number:
        return self.coerce(0)

    def one(self) -> Number:
        return self.coerce(1)

    def clamp_unit(self, y: Number) -> Number:
        """Pull a rounded result back into [0, 1)."""
        if self.tag is ModeTag.RATIONAL:
            return y
        if y < 0:
            return self.zero()
        if y >= 1:
            if self.tag is ModeTag.BINARY64:
                return math.nextafter(1.0, 0.0)
            return Decimal(1) - Decimal(10) ** (-self.precision)
        return y


def to_fraction(value: Number) -> Fraction:
    """Exact rational value of any supported number."""
    return Fraction(value)


def frac(value: Number) -> Number:
    """Fractional part, floor convention."""
    return value - math.floor(value)
