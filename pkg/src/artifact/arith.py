"""Exact rational arithmetic, combinatorial primitives, and certified comparisons.

Every identity check in this package is decided in exact arithmetic.  The value
type is `Rational` (stdlib `fractions.Fraction`: always reduced, denominator
positive, exact field operations).  Comparisons of an exact rational against a
transcendental bound (anything containing pi, e, or a square root) go through
outward-rounded interval arithmetic: the check passes only if the rational
clears the unfavorable endpoint of the interval, so a pass is a proof and never
a float accident.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

Rational = Fraction

# Interval context used for every transcendental bound. 128 binary digits of
# working precision; endpoints are outward-rounded by mpmath.
iv = mpmath.iv
iv.prec = 128


def binomial(n: int, k: int) -> int:
    """C(n, k) with the convention that out-of-range k gives 0."""
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def pow2(e: int) -> Rational:
    """Exact 2**e, e may be negative."""
    if e >= 0:
        return Fraction(1 << e)
    return Fraction(1, 1 << (-e))


def rational_str(q: Rational) -> str:
    """Serialize exactly: terminating decimal when one exists, else 'p/q'.

    A reduced fraction terminates in base 10 iff its denominator is 2^a * 5^b.
    """
    q = Fraction(q)
    den = q.denominator
    a = 0
    while den % 2 == 0:
        den //= 2
        a += 1
    b = 0
    while den % 5 == 0:
        den //= 5
        b += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    if q.denominator == 1:
        return str(q.numerator)
    # scale to 10^max(a,b) and place the decimal point
    digits = max(a, b)
    scaled = abs(q.numerator) * 10**digits // q.denominator
    sign = "-" if q.numerator < 0 else ""
    text = str(scaled).rjust(digits + 1, "0")
    whole, frac = text[:-digits], text[-digits:]
    return f"{sign}{whole}.{frac}"


def parse_rational(text: str) -> Rational:
    """Inverse of rational_str (also accepts plain ints and p/q)."""
    return Fraction(text)


# ---------------------------------------------------------------------------
# certified comparisons against transcendental expressions
# ---------------------------------------------------------------------------

def iv_rational(q: Rational) -> "iv.mpf":
    """Enclose an exact rational in an interval (tight to working precision)."""
    q = Fraction(q)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def certified_le(x: Rational, bound: "iv.mpf") -> bool:
    """True only if x <= bound is certain: x must clear the lower endpoint."""
    xi = iv_rational(x)
    return bool(xi.b <= bound.a)


def certified_ge(x: Rational, bound: "iv.mpf") -> bool:
    """True only if x >= bound is certain: x must clear the upper endpoint."""
    xi = iv_rational(x)
    return bool(xi.a >= bound.b)


def iv_float_down(x: "iv.mpf") -> float:
    """Float at or below the interval's lower endpoint (floor rounding)."""
    return mpmath.libmp.to_float(x._mpi_[0], rnd="f")


def iv_float_up(x: "iv.mpf") -> float:
    """Float at or above the interval's upper endpoint (ceiling rounding)."""
    return mpmath.libmp.to_float(x._mpi_[1], rnd="c")
