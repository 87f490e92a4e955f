"""Extended-real arithmetic helpers.

Values are plain Python numbers: int, Fraction, or float, with the two float
infinities standing in for +/-inf.  Fraction mixes exactly with the float
infinities under comparison, max/min and arithmetic, so no wrapper type is
needed.  The helpers below pin down the two conventions the variational
formulas rely on:

  * pos_part(s) is s for s > 0 and 0 otherwise (so pos_part(+inf) = +inf),
  * sub(a, b) is a - b except that inf - inf = 0 for same-signed infinities.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Num = Union[int, float, Fraction]

POS_INF = float("inf")
NEG_INF = float("-inf")

# Comparison tolerance used whenever a value chain passed through floats.
FLOAT_TOL = 1e-12


def is_pos_inf(v: Num) -> bool:
    return isinstance(v, float) and math.isinf(v) and v > 0


def is_neg_inf(v: Num) -> bool:
    return isinstance(v, float) and math.isinf(v) and v < 0


def is_finite(v: Num) -> bool:
    return not (isinstance(v, float) and math.isinf(v))


def is_exact(v: Num) -> bool:
    """True when v carries no rounding: int or Fraction (bool excluded)."""
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def pos_part(s: Num) -> Num:
    return s if s > 0 else 0


def sub(a: Num, b: Num) -> Num:
    """a - b with the convention inf - inf = 0 (either sign)."""
    if is_pos_inf(a) and is_pos_inf(b):
        return 0
    if is_neg_inf(a) and is_neg_inf(b):
        return 0
    return a - b


def close(a: Num, b: Num, tol: Num = 0) -> bool:
    """Equality up to tol; infinities only match infinities of the same sign."""
    if is_pos_inf(a) or is_pos_inf(b):
        return is_pos_inf(a) and is_pos_inf(b)
    if is_neg_inf(a) or is_neg_inf(b):
        return is_neg_inf(a) and is_neg_inf(b)
    return abs(a - b) <= tol


def fmt(v: Num):
    """JSON-safe encoding: infinities and Fractions become strings."""
    if is_pos_inf(v):
        return "inf"
    if is_neg_inf(v):
        return "-inf"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def parse(v) -> Num:
    """Inverse of fmt, also accepting plain JSON numbers.

    Strings may be "inf", "-inf", an integer literal, or "p/q".
    """
    if isinstance(v, bool):
        raise ValueError(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        s = v.strip()
        if s in ("inf", "+inf", "Infinity"):
            return POS_INF
        if s in ("-inf", "-Infinity"):
            return NEG_INF
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a number: {v!r}") from exc
    raise ValueError(f"not a number: {v!r}")
