"""Alpha-, beta- and gamma-duals of the Fibonacci difference spaces.

Membership of a in a dual reduces to a matrix-class condition on one of two
matrices built from a:

    c_nk = f_{n+1}^2 / (f_k f_{k+1}) * a_n                (k <= n)
    d_nk = sum_{j=k}^{n} f_{j+1}^2 / (f_k f_{k+1}) * a_j  (k <= n)

(a_n x_n) = (C y)_n and sum_{k<=n} a_k x_k = (D y)_n for x = V y, so each of
the sixteen sets below is a condition on C or D evaluated over a truncated
window and a grid of witnesses B.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .conditions import (
    Window,
    WitnessSearchConfig,
    bounded_sup,
    column_limits,
    column_weights,
    converges,
    forall_on_grid,
    lemma_l_to_l1_high,
    lemma_l_to_l1_low,
    lemma_l_to_linf_high,
    lemma_l_to_linf_low,
    series_bounded,
    sup_subset_sum,
    sup_weighted_rows,
    tends_to_zero,
    unestablished_limits,
    weighted_row_sums,
    _combine,
    _verdict,
)
from .errors import ExponentRangeError, SchemaError
from .fib import fib
from .numeric import DEFAULT_PRECISION, context, real_pow, to_mpf
from .seq import ExponentSeq, Seq, Verdict
from .spaces import SpaceId

__all__ = [
    "DualSetId", "KINDS", "WitnessSearchConfig", "c_matrix_entry", "c_window",
    "d_matrix_entry", "d_window", "dual_membership", "dual_set_check", "dual_sets",
]


def c_matrix_entry(a: Seq, n: int, k: int) -> Fraction:
    if k < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    if k > n:
        return Fraction(0)
    return Fraction(fib(n + 1) ** 2, fib(k) * fib(k + 1)) * a.eval(n)


def d_matrix_entry(a: Seq, n: int, k: int) -> Fraction:
    if k < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    if k > n:
        return Fraction(0)
    s = sum((fib(j + 1) ** 2 * a.eval(j) for j in range(k, n + 1)), Fraction(0))
    return s / (fib(k) * fib(k + 1))


def c_window(a: Seq, N: int, precision: int = DEFAULT_PRECISION) -> Window:
    av = a.values(N)
    rows = []
    for n in range(N + 1):
        top = fib(n + 1) ** 2 * av[n]
        rows.append([top / (fib(k) * fib(k + 1)) if top else Fraction(0) for k in range(n + 1)])
    return Window(rows, precision)


def d_window(a: Seq, N: int, precision: int = DEFAULT_PRECISION) -> Window:
    """d_nk = (G_n - G_{k-1}) / (f_k f_{k+1}) with G_n = sum_{j<=n} f_{j+1}^2 a_j."""
    av = a.values(N)
    G = list(itertools.accumulate(fib(j + 1) ** 2 * av[j] for j in range(N + 1)))
    rows = []
    for n in range(N + 1):
        rows.append([(G[n] - (G[k - 1] if k else 0)) / (fib(k) * fib(k + 1)) for k in range(n + 1)])
    return Window(rows, precision)


@dataclass(frozen=True)
class DualSetId:
    index: int

    def __post_init__(self):
        if not 1 <= self.index <= 16:
            raise SchemaError(f"dual set index must lie in 1..16, got {self.index}")

    @classmethod
    def parse(cls, text) -> DualSetId:
        if isinstance(text, DualSetId):
            return text
        t = str(text).strip().upper().lstrip("F").lstrip("̂").lstrip("_")
        try:
            return cls(int(t))
        except ValueError:
            raise SchemaError(f"cannot parse dual set id {text!r}") from None

    def __str__(self) -> str:
        return f"F{self.index}"


def _check_a(a: Seq):
    if not isinstance(a, Seq):
        raise SchemaError("a must be a sequence with an analyzable tail")


def dual_set_check(set_id: DualSetId | int | str, a: Seq, p: ExponentSeq,
                   cfg: WitnessSearchConfig | None = None,
                   precision: int = DEFAULT_PRECISION) -> Verdict:
    """Truncated verdict on whether a belongs to the set F_i(p)."""
    _check_a(a)
    cfg = cfg or WitnessSearchConfig()
    sid = set_id if isinstance(set_id, DualSetId) else DualSetId.parse(set_id)
    i, N = sid.index, cfg.truncation
    v = _CHECKS[i](a, p, cfg, precision, N)
    v.evidence.setdefault("set", str(sid))
    v.evidence.setdefault("config", cfg.to_dict())
    return v


def _f1(a, p, cfg, prec, N):
    return sup_subset_sum(c_window(a, N, prec), p, cfg, prec)


def _f2(a, p, cfg, prec, N):
    W = c_window(a, N, prec)
    terms = [abs(to_mpf(s, prec)) for s in W.row_sums()]
    return _verdict(series_bounded(terms, cfg, prec), N)


def _f3(a, p, cfg, prec, N):
    return sup_weighted_rows(d_window(a, N, prec), p, cfg, prec)


def _column_limit_verdict(a, p, cfg, prec, N):
    return column_limits(d_window(a, N, prec), cfg, prec).verdict(N)


def _f5(a, p, cfg, prec, N):
    W = d_window(a, N, prec)
    cl = column_limits(W, cfg, prec)
    return unestablished_limits(cl, N) or sup_weighted_rows(W, p, cfg, prec, shift=cl.alphas)


def _row_totals(a, N, prec):
    return [to_mpf(s, prec) for s in d_window(a, N, prec).row_sums()]


def _f6(a, p, cfg, prec, N):
    return _verdict(converges(_row_totals(a, N, prec), cfg, prec), N)


def _f7(a, p, cfg, prec, N):
    return _verdict(bounded_sup([abs(t) for t in _row_totals(a, N, prec)], cfg, prec), N)


def _f8(a, p, cfg, prec, N):
    return sup_subset_sum(d_window(a, N, prec), p, cfg, prec, sign=+1)


def _f9(a, p, cfg, prec, N):
    return sup_weighted_rows(d_window(a, N, prec), p, cfg, prec, sign=+1)


def _f10(a, p, cfg, prec, N):
    W = d_window(a, N, prec)
    cl = column_limits(W, cfg, prec)
    if early := unestablished_limits(cl, N):
        return early

    def at(B):
        colw = column_weights(p, B, +1, W.ncols, prec)
        return _verdict(tends_to_zero(weighted_row_sums(W, colw, shift=cl.alphas), cfg, prec), N)

    return forall_on_grid("B", at, cfg, N)


def _f12(a, p, cfg, prec, N):
    return lemma_l_to_l1_low(d_window(a, N, prec), p, cfg, prec)


def _f13(a, p, cfg, prec, N):
    return lemma_l_to_l1_high(d_window(a, N, prec), p, cfg, prec)


def _f14(a, p, cfg, prec, N):
    return lemma_l_to_linf_high(d_window(a, N, prec), p, cfg, prec)


def _f15(a, p, cfg, prec, N):
    W = d_window(a, N, prec)
    if p.range_kind() == "low":
        return lemma_l_to_linf_low(W, p, cfg, prec)
    # the same supremum, without the range restriction of the lemma form
    ctx = context(prec)
    vals = [max((real_pow(abs(v), p(k), prec) for k, v in enumerate(row) if v), default=ctx.zero)
            for row in W.mp]
    return _verdict(bounded_sup(vals, cfg, prec), N)


_CHECKS = {
    1: _f1, 2: _f2, 3: _f3, 4: _column_limit_verdict, 5: _f5, 6: _f6, 7: _f7,
    8: _f8, 9: _f9, 10: _f10, 11: _f9, 12: _f12, 13: _f13, 14: _f14, 15: _f15,
    16: _column_limit_verdict,
}

KINDS = ("alpha", "beta", "gamma")

_ROUTES = {
    ("c0", "alpha"): (1,),
    ("c0", "beta"): (3, 4, 5),
    ("c0", "gamma"): (3,),
    ("c", "alpha"): (1, 2),
    ("c", "beta"): (3, 4, 5, 6),
    ("c", "gamma"): (3, 7),
    ("linf", "alpha"): (8,),
    ("linf", "beta"): (9, 10),
    ("linf", "gamma"): (11,),
}


def dual_sets(space: SpaceId | str, kind: str, p: ExponentSeq) -> tuple[int, ...]:
    """The sets whose intersection is the requested dual."""
    if isinstance(space, str):
        space = SpaceId.parse(space)
    if kind not in KINDS:
        raise SchemaError(f"dual kind must be one of {KINDS}, got {kind!r}")
    if space.layer != "fhat":
        raise SchemaError(f"duals are provided for the Fibonacci difference spaces, got {space}")
    if space.family != "l":
        return _ROUTES[(space.family, kind)]
    rng = p.range_kind()
    if rng == "mixed":
        raise ExponentRangeError("duals of l(F,p) need every p_k <= 1 or every p_k > 1")
    if kind == "alpha":
        return (12,) if rng == "low" else (13,)
    if kind == "gamma":
        return (15,) if rng == "low" else (14,)
    # F14 needs conjugate exponents, which exist only when every p_k > 1
    return (15, 16) if rng == "low" else (14, 15, 16)


def dual_membership(space: SpaceId | str, kind: str, a: Seq, p: ExponentSeq,
                    cfg: WitnessSearchConfig | None = None,
                    precision: int = DEFAULT_PRECISION) -> Verdict:
    """Conjunction of the set checks that make up the dual."""
    cfg = cfg or WitnessSearchConfig()
    ids = dual_sets(space, kind, p)
    parts = {f"F{i}": dual_set_check(i, a, p, cfg, precision) for i in ids}
    if isinstance(space, str):
        space = SpaceId.parse(space)
    extra = {"space": str(space), "kind": kind, "sets": [f"F{i}" for i in ids]}
    if space.family == "l" and kind == "beta" and 14 not in ids:
        extra["skipped"] = {"F14": "conjugate exponents undefined for p_k <= 1"}
    return _combine(parts, cfg.truncation, **extra)

