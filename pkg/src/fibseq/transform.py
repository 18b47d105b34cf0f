"""The Fibonacci difference matrix, its explicit inverse, and the Schauder basis.

    fhat[n, n-1] = -f_{n+1}/f_n,   fhat[n, n] = f_n/f_{n+1}
    inv[n, k]    = f_{n+1}^2 / (f_k f_{k+1})          (0 <= k <= n)

All arithmetic here is exact; nothing is converted to floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fib import fib
from .numeric import DEFAULT_PRECISION
from .seq import ExponentSeq, Seq, TailModel, TailSpec, ZeroTail

# (25/64) > phi**-2, used as a rational contraction factor in tail envelopes
_PHI_INV_SQ_BOUND = Fraction(25, 64)


def fhat_entry(n: int, k: int) -> Fraction:
    if k == n:
        return Fraction(fib(n), fib(n + 1))
    if k == n - 1:
        return -Fraction(fib(n + 1), fib(n))
    return Fraction(0)


def inverse_entry(n: int, k: int) -> Fraction:
    if 0 <= k <= n:
        return Fraction(fib(n + 1) ** 2, fib(k) * fib(k + 1))
    return Fraction(0)


def _values(x, N: int) -> list[Fraction]:
    if isinstance(x, Seq):
        return x.values(N)
    vals = [Fraction(v) for v in x]
    if len(vals) < N + 1:
        vals += [Fraction(0)] * (N + 1 - len(vals))
    return vals[: N + 1]


def fhat_value(x: Seq, k: int) -> Fraction:
    """(F x)_k with the convention x_{-1} = 0."""
    prev = x.eval(k - 1) if k > 0 else Fraction(0)
    return Fraction(fib(k), fib(k + 1)) * x.eval(k) - Fraction(fib(k + 1), fib(k)) * prev


def fhat_apply(x: Seq | Sequence, N: int) -> list[Fraction]:
    """y_0..y_N of y = F x. A plain list input is read as x_0..x_N (missing entries zero)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    xs = _values(x, N)
    out = []
    prev = Fraction(0)
    for k, xk in enumerate(xs):
        out.append(Fraction(fib(k), fib(k + 1)) * xk - Fraction(fib(k + 1), fib(k)) * prev)
        prev = xk
    return out


def inverse_apply(y: Seq | Sequence, N: int) -> list[Fraction]:
    """x_0..x_N of x = V y, x_k = f_{k+1}^2 * sum_{j<=k} y_j / (f_j f_{j+1})."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    ys = _values(y, N)
    out = []
    acc = Fraction(0)
    for k, yk in enumerate(ys):
        acc += yk / (fib(k) * fib(k + 1))
        out.append(fib(k + 1) ** 2 * acc)
    return out


def identity_check(N: int) -> bool:
    """Both N x N leading blocks F V and V F equal the identity, exactly.

    F has two diagonals, so each product entry is a sum of at most two terms.
    """
    if N < 1:
        raise ValueError("identity_check needs N >= 1")
    for n in range(N):
        for k in range(N):
            fv = sum((fhat_entry(n, j) * inverse_entry(j, k) for j in (n - 1, n) if j >= 0), Fraction(0))
            vf = sum((inverse_entry(n, j) * fhat_entry(j, k) for j in (k, k + 1) if j < N), Fraction(0))
            want = 1 if n == k else 0
            if fv != want or vf != want:
                return False
    return True


def basis_vector(k: int, N: int) -> list[Fraction]:
    """b^(k)_0..b^(k)_N: column k of the inverse matrix."""
    if k < 0 or N < 0:
        raise ValueError("indices must be nonnegative")
    den = fib(k) * fib(k + 1)
    return [Fraction(fib(n + 1) ** 2, den) if n >= k else Fraction(0) for n in range(N + 1)]


# ---------------------------------------------------------------------------
# tail analysis of y = F x
# ---------------------------------------------------------------------------

class FibDifferenceTail(TailModel):
    """y_k = c (f_k/f_{k+1} - f_{k+1}/f_k), the transform of a constant tail.

    r_k = f_{k+1}/f_k decreases to phi along odd k and increases to phi along
    even k, so suprema over k >= K are attained at K or K + 1. The limit is -c.
    """

    def __init__(self, start: int, c: Fraction):
        self.start = max(start, 1)
        self.c = Fraction(c)
        self.limit = -self.c

    def value(self, k: int) -> Fraction:
        return self.c * (Fraction(fib(k), fib(k + 1)) - Fraction(fib(k + 1), fib(k)))

    def sup_abs(self, K):
        return max(abs(self.value(K)), abs(self.value(K + 1)))

    def sup_dev(self, K):
        return max(abs(self.value(K) - self.limit), abs(self.value(K + 1) - self.limit))

    def envelope(self, K):
        # |y_k + c| <= 2|c| |r_k - phi| <= 2|c| phi**(-2k)
        return 2 * abs(self.c) * _PHI_INV_SQ_BOUND**K, _PHI_INV_SQ_BOUND

    def nonvanishing(self):
        return self.c != 0


class GeometricEnvelopeTail(TailModel):
    """Transform of x_k = c r**(k-L): |y_k| <= |c| |r|**(k-1-L) (|r| + 2)."""

    exact = False

    def __init__(self, L: int, c: Fraction, r: Fraction):
        self.L = L
        self.start = L + 1
        self.c = Fraction(c)
        self.r = Fraction(r)
        self.limit = Fraction(0)

    def sup_abs(self, K):
        return abs(self.c) * abs(self.r) ** (K - 1 - self.L) * (abs(self.r) + 2)

    sup_dev = sup_abs

    def envelope(self, K):
        return self.sup_abs(K), abs(self.r)

    def nonvanishing(self):
        # r f_k/f_{k+1} = f_{k+1}/f_k would need r >= 1
        return self.c != 0 and self.r != 0


class FhatView:
    """Lazy y = F x with closed-form tail knowledge."""

    def __init__(self, x: Seq):
        t = x.tail.normalized()
        if t.kind == "geometric" and t.r == 0:
            x = Seq(x.prefix + (t.c,), TailSpec.zero())
        else:
            x = Seq(x.prefix, t)
        self.x = x

    def eval(self, k: int) -> Fraction:
        return fhat_value(self.x, k)

    def values(self, N: int) -> list[Fraction]:
        return fhat_apply(self.x, N)

    def tail_model(self) -> TailModel:
        L = len(self.x.prefix)
        t = self.x.tail
        if t.kind == "zero":
            return ZeroTail(L + 1)
        if t.kind == "constant":
            return FibDifferenceTail(L + 1, t.c)
        return GeometricEnvelopeTail(L, t.c, t.r)


class ListView:
    """A finite list of values, zero beyond its end."""

    def __init__(self, values: Sequence):
        self.vals = [Fraction(v) for v in values]

    def eval(self, k: int) -> Fraction:
        return self.vals[k] if k < len(self.vals) else Fraction(0)

    def values(self, N: int) -> list[Fraction]:
        return [self.eval(k) for k in range(N + 1)]

    def tail_model(self) -> TailModel:
        return ZeroTail(len(self.vals))


class MaskedView:
    """The underlying view with indices 0..n forced to zero."""

    def __init__(self, view, n: int):
        self.view = view
        self.n = n

    def eval(self, k: int) -> Fraction:
        return Fraction(0) if k <= self.n else self.view.eval(k)

    def values(self, N: int) -> list[Fraction]:
        return [self.eval(k) for k in range(N + 1)]

    def tail_model(self) -> TailModel:
        model = self.view.tail_model()
        if model.start <= self.n:
            # tail models are shift-invariant in K, only the start moves
            model.start = self.n + 1
        return model


# ---------------------------------------------------------------------------
# basis expansion
# ---------------------------------------------------------------------------

@dataclass
class BasisExpansion:
    coefficients: list[Fraction]
    partial_sum: list[Fraction]
    residual: object
    residual_exact: bool

    def to_dict(self) -> dict:
        return {"coefficients": self.coefficients, "partial_sum": self.partial_sum,
                "residual": self.residual, "residual_exact": self.residual_exact}


def basis_expand(x: Seq, n: int, p: ExponentSeq, N: int | None = None,
                 precision: int = DEFAULT_PRECISION) -> BasisExpansion:
    """Coefficients mu_k = (F x)_k for k <= n, the partial sum sum_k mu_k b^(k) up to
    index N, and the residual g(x - partial sum).

    F(x - partial sum) is F x with its first n + 1 entries removed, so the
    residual is the paranorm sup over k > n, closed-form in the tail.
    """
    from .spaces import h1_estimate  # local: spaces builds on this module

    if n < 0:
        raise ValueError("n must be nonnegative")
    if N is None:
        N = max(n, len(x.prefix)) + 8
    mu = fhat_apply(x, n)
    partial = [Fraction(0)] * (N + 1)
    for k, m in enumerate(mu):
        if m == 0:
            continue
        for i, b in enumerate(basis_vector(k, N)):
            partial[i] += m * b
    res = h1_estimate(MaskedView(FhatView(x), n), p, max(N, n + 1), precision)
    return BasisExpansion(mu, partial, res.value, res.exact)
