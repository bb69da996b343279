"""Exact visit counts for circle rotations and the fast power jump built on them."""

import math
from fractions import Fraction
from typing import Optional, Tuple

from .continued_fraction import convergents, distance_to_integer, partial_quotients


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """
    Sum of floor((a*i + b) / m) for i = 0 .. n-1.

    Euclid-like reduction; a and b may be negative.

    Args:
        n: Number of terms (>= 0)
        m: Positive modulus
        a: Slope numerator
        b: Offset numerator

    Returns:
        The exact integer sum
    """
    if n <= 0:
        return 0
    if m <= 0:
        raise ValueError("floor_sum needs a positive modulus")
    total = 0
    while True:
        if a >= m or a < 0:
            q, a = divmod(a, m)
            total += q * (n * (n - 1) // 2)
        if b >= m or b < 0:
            q, b = divmod(b, m)
            total += q * n
        y_max = a * n + b
        if y_max < m:
            break
        n, b = divmod(y_max, m)
        m, a = a, m
    return total


def _floor_of_progression(start: Fraction, step: Fraction, count: int) -> int:
    """Sum of floor(start + step*i) for i = 0 .. count-1."""
    den = start.denominator * step.denominator // math.gcd(
        start.denominator, step.denominator
    )
    a = step.numerator * (den // step.denominator)
    b = start.numerator * (den // start.denominator)
    return floor_sum(count, den, a, b)


def visit_count(
    alpha: Fraction, kappa: Fraction, x: Fraction, start: int, stop: int
) -> int:
    """
    Number of l in [start, stop) with frac(x + l*alpha) in [0, kappa).

    Uses frac(y) < kappa  <=>  floor(y) - floor(y - kappa) = 1.
    """
    count = stop - start
    if count <= 0:
        return 0
    first = x + start * alpha
    return _floor_of_progression(first, alpha, count) - _floor_of_progression(
        first - kappa, alpha, count
    )


def rotation_jump(alpha: Fraction, kappa: Fraction, x: Fraction, n: int) -> Fraction:
    """
    Position of the n-th return (n >= 1) of x under rotation by alpha to [0, kappa).

    Return times of the induced map are 1 or 2, so the n-th return happens at a
    rotation time M in [n, 2n]; M is located by bisection on exact counts.

    Returns:
        frac(x + M*alpha) for the smallest M with n visits among times 1..M
    """
    lo, hi = n, 2 * n
    while lo < hi:
        mid = (lo + hi) // 2
        if visit_count(alpha, kappa, x, 1, mid + 1) >= n:
            hi = mid
        else:
            lo = mid + 1
    y = x + lo * alpha
    return y - math.floor(y)


def first_close_return(
    alpha: Fraction, width: Fraction, max_terms: int = 64
) -> Optional[int]:
    """
    Smallest h >= 1 with ||h*alpha|| < width.

    The minimizer is always a convergent denominator, so only those are checked.
    Returns None if the expansion terminates first.
    """
    for _, q in convergents(partial_quotients(alpha, max_terms)):
        if q >= 1 and distance_to_integer(q * alpha) < width:
            return q
    return None


def return_time_lower_bound(
    alpha: Fraction, kappa: Fraction, width: Fraction
) -> Tuple[int, Optional[int]]:
    """
    Certified lower bound on the minimal return time of an interval of the IET.

    An interval of width w in IET coordinates is an arc of width kappa*w for the
    rotation. Its first rotation return h is a convergent denominator; the number of
    visits to [0, kappa) over h consecutive steps is at least h*kappa - 2
    (Denjoy-Koksma) and at least h/2 since induced return times are 1 or 2.

    Returns:
        (lower bound on the IET return time, rotation return h or None)
    """
    h = first_close_return(alpha, kappa * width)
    if h is None:
        return 1, None
    bound = max(math.ceil(Fraction(h, 2)), math.ceil(h * kappa - 2), 1)
    return int(bound), h
