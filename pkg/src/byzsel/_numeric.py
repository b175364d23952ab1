"""Numeric-mode helpers.

The library runs in one of two arithmetic modes, carried by the element type
of the instance values: 64-bit binary floats (default) or exact rationals
(fractions.Fraction, used by tests, small instances, and the CLI --exact
flag). Helpers here convert between the modes and centralize the tolerances
used by float-mode comparisons.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

import numpy as np

Number = Union[float, Fraction]

# relative tolerance for float-mode value comparisons
REL_TOL = 1e-9
# absolute nudge applied before flooring fractional saturation counts
FLOOR_GUARD = 1e-12


def is_exact(x) -> bool:
    """True when x is an exact rational scalar (Fraction or int)."""
    return isinstance(x, Rational) and not isinstance(x, bool)


def exact_seq(values: Sequence) -> bool:
    """True when every element of values is an exact rational."""
    return all(is_exact(x) for x in values)


def coerce_values(values: Sequence, exact: bool):
    """Convert raw numbers into the requested arithmetic mode.

    Args:
        values: numbers; ints, floats, Fractions, or "a/b" strings.
        exact: target mode; True for Fraction, False for float.

    Returns:
        List of Fraction (exact) or float (inexact) values; float64 numpy
        input passes through without an elementwise loop.
    """
    if not exact and isinstance(values, np.ndarray):
        return np.asarray(values, dtype=np.float64)
    out = []
    for x in values:
        if isinstance(x, str):
            x = Fraction(x)
        out.append(Fraction(x) if exact else float(x))
    return out


def rel_close(a: float, b: float, rel: float = REL_TOL) -> bool:
    """True when a and b agree within relative tolerance (abs fallback near 0)."""
    return math.isclose(a, b, rel_tol=rel, abs_tol=1e-12)


def guarded_floor(x, guard: float = FLOOR_GUARD) -> int:
    """Floor for nonnegative x; float mode nudges up by guard first.

    Exact rationals floor exactly. The nudge keeps a float that should be an
    integer (but landed a hair below it) from losing a whole saturation step.
    """
    if is_exact(x):
        return int(x)
    return int(float(x) + guard)


def as_float_array(values: Sequence) -> np.ndarray:
    """Read-only float64 array view of a value sequence."""
    if isinstance(values, np.ndarray) and values.dtype == np.float64:
        arr = values
    else:
        arr = np.asarray([float(x) for x in values], dtype=np.float64)
    if arr.flags.writeable:
        arr = arr.copy()
        arr.flags.writeable = False
    return arr


def freeze(seq, exact: bool):
    """Immutable container for a numeric sequence in the given mode.

    Exact mode stores a tuple of Fractions; float mode a read-only float64
    numpy array. Both support len, indexing, and iteration.
    """
    if exact:
        return tuple(Fraction(x) for x in seq)
    return as_float_array(seq)


def format_number(x, precision: int = 12) -> str:
    """Render a number for CLI output.

    Fractions render as "a/b" (or a bare integer); floats render with the
    requested number of significant digits.
    """
    if is_exact(x):
        f = Fraction(x)
        if f.denominator == 1:
            return str(f.numerator)
        return f"{f.numerator}/{f.denominator}"
    return format(float(x), f".{precision}g")


def parse_number(x, exact: bool):
    """Parse a JSON-level number or "a/b" string into the requested mode."""
    if isinstance(x, str):
        frac = Fraction(x)
        return frac if exact else float(frac)
    # floats convert to their exact binary value; the CLI's exact mode parses
    # JSON decimals through parse_float=Fraction so no float reaches here
    return Fraction(x) if exact else float(x)
