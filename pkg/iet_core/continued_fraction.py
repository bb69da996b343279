"""Continued fractions of rotation numbers."""

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Sequence, Tuple

from .arithmetic import Number


def partial_quotients(value: Number, max_terms: int = 64) -> List[int]:
    """
    Partial quotients [a0; a1, a2, ...] of a number.

    The expansion is exact on the rational value of the input, so a binary64
    approximation of an irrational yields correct leading quotients only.

    Args:
        value: Number to expand
        max_terms: Maximum number of quotients returned

    Returns:
        List of partial quotients, a0 first
    """
    x = Fraction(value)
    quotients: List[int] = []
    while len(quotients) < max_terms:
        a = math.floor(x)
        quotients.append(a)
        rest = x - a
        if rest == 0:
            break
        x = 1 / rest
    return quotients


def convergents(quotients: Sequence[int]) -> List[Tuple[int, int]]:
    """Convergents (p_n, q_n) of a partial-quotient list."""
    result: List[Tuple[int, int]] = []
    p_prev, p = 1, quotients[0] if quotients else 0
    q_prev, q = 0, 1
    if quotients:
        result.append((p, q))
    for a in quotients[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        result.append((p, q))
    return result


def denominators(value: Number, q_max: int, max_terms: int = 64) -> List[int]:
    """Distinct convergent denominators q_n <= q_max, increasing."""
    qs: List[int] = []
    for _, q in convergents(partial_quotients(value, max_terms)):
        if q > q_max:
            break
        if not qs or q > qs[-1]:
            qs.append(q)
    return qs


def distance_to_integer(value: Fraction) -> Fraction:
    """||value||, the distance to the nearest integer."""
    f = value - math.floor(value)
    return min(f, 1 - f)


def alpha_from_cf(prefix: Sequence[int], precision: int = 50) -> Decimal:
    """
    Rotation number [0; prefix..., 1, 1, 1, ...] with a golden tail.

    Args:
        prefix: Leading partial quotients a1, a2, ... (all >= 1)
        precision: Decimal digits of the result

    Returns:
        The rotation number in (0, 1)

    Raises:
        ValueError: If a quotient is not a positive integer
    """
    if any(int(a) != a or a < 1 for a in prefix):
        raise ValueError(f"Partial quotients must be positive integers: {list(prefix)}")
    with localcontext() as ctx:
        ctx.prec = precision + 10
        tail = (1 + Decimal(5).sqrt()) / 2
        x = tail
        for a in reversed(list(prefix)):
            x = Decimal(a) + 1 / x
        alpha = 1 / x
        ctx.prec = precision
        return +alpha


def parse_alpha_cf(text: str, precision: int = 50) -> Decimal:
    """Parse the CLI form: "golden" or "2,3,80,500" (golden tail appended)."""
    text = text.strip().lower()
    if text in ("golden", ""):
        return alpha_from_cf([], precision)
    prefix = [int(part) for part in text.split(",") if part.strip()]
    return alpha_from_cf(prefix, precision)
