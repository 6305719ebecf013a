"""Exact rational parsing and formatting.

All arithmetic in this package is exact; values cross module boundaries as
:class:`fractions.Fraction`.  The text surface syntax is ``p/q`` in lowest
terms, or a bare integer when the denominator is 1.
"""

from __future__ import annotations

import re
from fractions import Fraction

__all__ = ["Fraction", "parse_rational", "format_rational"]

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/([1-9]\d*))?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or a bare integer into a Fraction.

    Raises ValueError on anything else, including whitespace inside the
    token and zero or negative denominators.
    """
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    """Format a Fraction as ``p/q`` in lowest terms, or bare ``p`` if q == 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
