"""Exact rational helpers shared by the threshold and measure layers.

Threshold arithmetic works in `fractions.Fraction` throughout; floats enter
only in numeric verification. Floats given by users are read as the decimal
literal they print as (Fraction("0.1") = 1/10), not as their binary expansion,
so CLI inputs behave the way they were typed.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def as_fraction(value) -> Fraction:
    """Coerce int/str/Fraction/float to an exact Fraction."""
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        value = float(value)  # numpy scalars repr differently
        if not value == value or value in (float("inf"), float("-inf")):
            raise ValueError(f"cannot represent {value!r} as a rational")
        return Fraction(repr(value))
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_fraction(value: Fraction | None) -> str:
    """Serialize as "num/den" ("inf" for the open-ended sentinel None)."""
    if value is None:
        return "inf"
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction | None:
    if text.strip().lower() in ("inf", "infinity"):
        return None
    return Fraction(text)
