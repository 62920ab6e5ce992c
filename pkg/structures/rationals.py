"""Exact rational helpers: every number in the workbench is a Fraction."""

from fractions import Fraction
from typing import Union

from .exceptions import RationalFormatError

RationalLike = Union[Fraction, int, str]


def parse_rational(value: RationalLike) -> Fraction:
    """
    Parse "p/q", "p" or an int into a Fraction.

    Floats are rejected: they would silently introduce rounding.
    """
    if isinstance(value, bool):
        raise RationalFormatError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if '/' in text:
                num, den = text.split('/', 1)
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError):
            raise RationalFormatError(f"Not a rational: {value!r}")
    raise RationalFormatError(f"Not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Canonical text form, always with a denominator: 0 -> '0/1'."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def ceil_fraction(value: Fraction) -> int:
    return -((-value.numerator) // value.denominator)
