"""Exact Fibonacci numbers with the convention f_0 = f_1 = 1.

Every other module divides by f_k, so the usual f_0 = 0 start would make
the difference matrix singular.
"""

from __future__ import annotations

import threading
from fractions import Fraction

from .numeric import context, to_mpf


class FibCache:
    """Append-only table of Fibonacci numbers, grown iteratively on demand."""

    def __init__(self) -> None:
        self._values: list[int] = [1, 1]
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def get(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"Fibonacci index must be nonnegative, got {n}")
        values = self._values
        if n < len(values):
            return values[n]
        with self._lock:
            values = self._values
            while len(values) <= n:
                values.append(values[-1] + values[-2])
            return values[n]


_CACHE = FibCache()


def fib(n: int) -> int:
    """Return f_n with f_0 = f_1 = 1."""
    return _CACHE.get(n)


def ratio(k: int) -> Fraction:
    """f_{k+1} / f_k."""
    return Fraction(fib(k + 1), fib(k))


def cassini_residual(n: int) -> int:
    """f_{n-1} f_{n+1} - f_n^2, which equals (-1)^(n+1)."""
    if n < 1:
        raise ValueError("cassini_residual needs n >= 1")
    return fib(n - 1) * fib(n + 1) - fib(n) ** 2


def cassini_substituted(n: int) -> int:
    """f_{n-1}^2 + f_n f_{n-1} - f_n^2 (Cassini with f_{n+1} eliminated)."""
    if n < 1:
        raise ValueError("cassini_substituted needs n >= 1")
    a, b = fib(n - 1), fib(n)
    return a * a + b * a - b * b


def fib_prefix_sum(n: int) -> int:
    if n < 0:
        raise ValueError("fib_prefix_sum needs n >= 0")
    return sum(fib(k) for k in range(n + 1))


def golden_ratio_error(n: int, precision: int = 128):
    """|f_{n+1}/f_n - (1 + sqrt 5)/2| at `precision` bits."""
    if n < 1:
        raise ValueError("golden_ratio_error needs n >= 1")
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    ctx = context(precision)
    phi = (1 + ctx.sqrt(5)) / 2
    return abs(to_mpf(Fraction(fib(n + 1), fib(n)), precision) - phi)


def reciprocal_fib_partial_sum(n: int, precision: int = 128):
    """sum_{k<=n} 1/f_k at `precision` bits."""
    if n < 0:
        raise ValueError("reciprocal_fib_partial_sum needs n >= 0")
    ctx = context(precision)
    total = ctx.mpf(0)
    for k in range(n + 1):
        total += to_mpf(Fraction(1, fib(k)), precision)
    return total
