"""Exact rational parsing and dyadic (power-of-two) helpers.

Every quantity in this package is a :class:`fractions.Fraction`.  Floats are
rejected at the boundary so that equality assertions stay decidable.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["parse_rational", "is_power_of_two", "dyadic_floor", "dyadic_exponent"]


def parse_rational(value: object) -> Fraction:
    """Convert an int, Fraction, or string ("7", "3/4", "0.75") to a Fraction.

    Floats are refused: a binary float does not carry the decimal the user
    wrote, so accepting one would silently lose exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"expected a rational number, got bool {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational from {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}: pass a string such as '3/4' or '0.75'")
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def is_power_of_two(q: Fraction) -> bool:
    """True iff q == 2**k for some integer k (negative k allowed)."""
    if q <= 0:
        return False
    num, den = q.numerator, q.denominator
    return num & (num - 1) == 0 and den & (den - 1) == 0


def dyadic_floor(q: Fraction) -> Fraction:
    """Largest power of two <= q, found by exact doubling/halving.

    Never touches logarithms, so the bracket 2**n <= q < 2**(n+1) is exact.
    """
    if q <= 0:
        raise ValueError(f"dyadic_floor needs a positive value, got {q}")
    p = Fraction(1)
    if p <= q:
        while p * 2 <= q:
            p *= 2
    else:
        while p > q:
            p /= 2
    return p


def dyadic_exponent(q: Fraction) -> int:
    """The integer k with q == 2**k; raises if q is not a power of two."""
    if not is_power_of_two(q):
        raise ValueError(f"{q} is not a power of two")
    return q.numerator.bit_length() - q.denominator.bit_length()
