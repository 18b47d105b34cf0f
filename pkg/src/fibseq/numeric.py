"""The single inexact layer: rational bases raised to real exponents.

Everything upstream is exact `Fraction` arithmetic. Values leave that world
only here, rounded once to a caller-chosen binary precision.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import mpmath
from mpmath.libmp import from_rational, round_nearest

DEFAULT_PRECISION = 128


@functools.lru_cache(maxsize=None)
def context(precision: int) -> mpmath.ctx_mp.MPContext:
    # one private context per precision keeps callers off the global mp state
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


def to_mpf(value, precision: int = DEFAULT_PRECISION):
    """Correctly rounded conversion of an int/Fraction to a binary float."""
    ctx = context(precision)
    if isinstance(value, int):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return ctx.make_mpf(
            from_rational(value.numerator, value.denominator, precision, round_nearest)
        )
    return ctx.mpf(value)


def pow_abs(base: Fraction, exponent: Fraction, precision: int = DEFAULT_PRECISION):
    """|base| ** exponent for exponent > 0, rounded once where possible."""
    ctx = context(precision)
    base = abs(Fraction(base))
    exponent = Fraction(exponent)
    if base == 0:
        return ctx.zero if exponent > 0 else ctx.one
    if exponent.denominator == 1:
        e = exponent.numerator
        exact = base**e if e >= 0 else 1 / base ** (-e)
        return to_mpf(exact, precision)
    if exponent.denominator == 2 and exponent > 0:
        return ctx.sqrt(to_mpf(base**exponent.numerator, precision + 8))
    return ctx.power(to_mpf(base, precision + 16), to_mpf(exponent, precision + 16))


def real_pow(base, exponent: Fraction, precision: int = DEFAULT_PRECISION):
    """base ** exponent for an already-real nonnegative base."""
    ctx = context(precision)
    if base == 0:
        return ctx.zero
    exponent = Fraction(exponent)
    if exponent == 1:
        return ctx.mpf(base)
    return ctx.power(ctx.mpf(base), to_mpf(exponent, precision + 16))


def ulp(x, precision: int = DEFAULT_PRECISION):
    ctx = context(precision)
    if x == 0:
        return ctx.ldexp(1, -precision - 1000)
    _, exp = ctx.frexp(x)
    return ctx.ldexp(1, exp - precision)


def decimal_digits(precision: int) -> int:
    return max(1, int(precision * math.log10(2)))


def format_real(x, precision: int = DEFAULT_PRECISION) -> str:
    """Deterministic decimal rendering carrying the significant digits of `precision` bits."""
    ctx = context(precision)
    if ctx.isinf(x):
        return "inf" if x > 0 else "-inf"
    return ctx.nstr(x, decimal_digits(precision), strip_zeros=True)


def to_json(obj, precision: int = DEFAULT_PRECISION):
    """Integers and rationals become strings, reals become tagged decimals."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return {"decimal": repr(obj), "precision_bits": 53}
    if hasattr(obj, "_mpf_"):
        return {"decimal": format_real(obj, precision), "precision_bits": precision}
    if isinstance(obj, dict):
        return {str(k): to_json(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v, precision) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_json(obj.to_dict(), precision)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
