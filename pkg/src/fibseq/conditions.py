"""Truncated evaluation of matrix-class conditions over a finite window of a matrix.

A `Window` holds the exact entries w_nk for n, k inside the truncation. The
evaluators turn a supremum or limit over the infinite index set into a
sequence indexed by the truncation and hand it to `detect`. Quantifiers over
the auxiliary integers B, L, M range over a finite grid recorded in each
verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .detect import Assessment, assess_bounded, assess_convergent, assess_null, running_sup
from .errors import ExponentRangeError
from .numeric import DEFAULT_PRECISION, context, real_pow, to_mpf
from .seq import ExponentSeq, Status, Verdict, combine_status


@dataclass(frozen=True)
class WitnessSearchConfig:
    truncation: int = 128
    grid_max_exponent: int = 20
    k_max: int = 12
    blowup: float = 1e30
    tol: float = 1e-12

    def __post_init__(self):
        if self.truncation < 4:
            raise ValueError("truncation must be at least 4")
        if not 1 <= self.grid_max_exponent <= 64:
            raise ValueError("grid exponent must lie in 1..64")
        if not 0 <= self.k_max <= 16:
            raise ValueError("k_max must lie in 0..16")

    def grid(self) -> list[int]:
        return [2**i for i in range(1, self.grid_max_exponent + 1)]

    def to_dict(self) -> dict:
        return {"truncation": self.truncation, "grid": self.grid(), "k_max": self.k_max,
                "blowup": self.blowup, "tol": self.tol}


class Window:
    """Exact entries w_nk, 0 <= n < rows, 0 <= k < cols, with cached binary copies."""

    def __init__(self, rows: list[list[Fraction]], precision: int = DEFAULT_PRECISION):
        self.exact = rows
        self.precision = precision
        self.nrows = len(rows)
        self.ncols = max((len(r) for r in rows), default=0)
        self._mp = None

    @property
    def N(self) -> int:
        return self.nrows - 1

    @property
    def mp(self) -> list[list]:
        if self._mp is None:
            zero = to_mpf(0, self.precision)
            self._mp = [[to_mpf(v, self.precision) if v else zero for v in row]
                        + [zero] * (self.ncols - len(row)) for row in self.exact]
        return self._mp

    def abs_sparse(self, shift: list | None = None) -> list[list[tuple[int, object]]]:
        """Per row, the (k, |w_nk - shift_k|) pairs that are nonzero."""
        key = None if shift is None else id(shift)
        cache = self.__dict__.setdefault("_abs_cache", {})
        if key not in cache:
            if shift is None:
                rows = [[(k, abs(v)) for k, v in enumerate(row) if v] for row in self.mp]
            else:
                rows = [[(k, abs(v - a)) for k, (v, a) in enumerate(zip(row, shift)) if v != a]
                        for row in self.mp]
            cache[key] = (shift, rows)  # keep shift alive so its id stays unique
        return cache[key][1]

    def transposed(self) -> Window:
        cols = [[(row[k] if k < len(row) else Fraction(0)) for row in self.exact]
                for k in range(self.ncols)]
        return Window(cols, self.precision)

    def row_sums(self) -> list[Fraction]:
        return [sum(row, Fraction(0)) for row in self.exact]


def column_weights(p: ExponentSeq, base: int, sign: int, count: int, precision: int) -> list:
    """base ** (sign / p_k) for k < count."""
    ctx = context(precision)
    cache: dict = {}
    out = []
    for k in range(count):
        e = Fraction(sign) / p(k)
        if e not in cache:
            cache[e] = ctx.power(ctx.mpf(base), to_mpf(e, precision + 16))
        out.append(cache[e])
    return out


def _verdict(a: Assessment, N: int, witnesses=None, **extra) -> Verdict:
    return Verdict(a.status, N, witnesses=witnesses or {}, evidence={**a.evidence, **extra})


# ---------------------------------------------------------------------------
# quantifiers over the witness grid
# ---------------------------------------------------------------------------

def exists_on_grid(name: str, evaluate: Callable[[int], Verdict], cfg: WitnessSearchConfig,
                   N: int) -> Verdict:
    """Exists w in the grid with evaluate(w) holding, for quantities nonincreasing in w.

    The largest grid point is tried first. If it holds, a bisection finds the
    smallest grid point that also holds, and that point is the reported witness.
    """
    grid = cfg.grid()
    top = evaluate(grid[-1])
    ev = {"grid": grid, "quantifier": "exists", "variable": name}
    if not top.holds:
        # smaller witnesses give larger quantities, so none of them can do better
        return Verdict(top.status, N, {}, {**ev, "at_largest": top.to_dict()})
    lo, hi, best = 0, len(grid) - 1, top
    while lo < hi:
        mid = (lo + hi) // 2
        v = evaluate(grid[mid])
        if v.holds:
            hi, best = mid, v
        else:
            lo = mid + 1
    return Verdict(Status.HOLDS, N, {name: grid[hi], **best.witnesses},
                   {**ev, "at_witness": best.to_dict()})


def forall_on_grid(name: str, evaluate: Callable[[int], Verdict], cfg: WitnessSearchConfig,
                   N: int) -> Verdict:
    """Every grid point must hold; the first failing point (from the top) is a counterexample."""
    grid = cfg.grid()
    results = {}
    for w in reversed(grid):
        v = evaluate(w)
        results[w] = v
        if v.fails:
            return Verdict(Status.FAILS, N, {f"{name}_counterexample": w},
                           {"grid": grid, "quantifier": "forall", "variable": name,
                            "at_counterexample": v.to_dict()})
    status = combine_status(v.status for v in results.values())
    witnesses = {f"{name}={w}": v.witnesses for w, v in results.items() if v.witnesses}
    return Verdict(status, N, witnesses,
                   {"grid": grid, "quantifier": "forall", "variable": name,
                    "statuses": {w: v.status.value for w, v in sorted(results.items())},
                    "at_largest": results[grid[-1]].to_dict()})


# ---------------------------------------------------------------------------
# primitive quantities
# ---------------------------------------------------------------------------

def weighted_row_sums(W: Window, colw: list, rowf: list | None = None,
                      shift: list | None = None) -> list:
    """R_n = rowf_n * sum_k |w_nk - shift_k| colw_k."""
    zero = context(W.precision).zero
    out = []
    for n, row in enumerate(W.abs_sparse(shift)):
        s = sum((v * colw[k] for k, v in row), zero)
        out.append(s * rowf[n] if rowf is not None else s)
    return out


def bounded_sup(values: list, cfg: WitnessSearchConfig, precision: int) -> Assessment:
    """Is sup_n values_n finite? Tested on the running supremum."""
    a = assess_bounded(running_sup(values), cfg.tol, cfg.blowup, precision)
    a.evidence["sup_at_truncation"] = max(values)
    return a


def subset_sup(X: list[list], outer: list[Fraction] | None, cfg: WitnessSearchConfig,
               precision: int) -> Assessment:
    """sup over finite column sets K of sum_r phi_r(|sum_{c in K} X_rc|), phi_r(t) = t**outer_r.

    The quantity is evaluated on every leading m x m block, so the sequence
    handed to the boundedness test tracks growth in the truncation. Sandwich:
    the upper bound takes, row by row, the larger of the positive and negative
    parts; the lower bound is the best of all subsets of the first k_max + 1
    columns and three greedy sets.
    """
    ctx = context(precision)
    size = max(len(X), max((len(row) for row in X), default=0))
    X = [list(row) + [ctx.zero] * (size - len(row)) for row in X]
    X += [[ctx.zero] * size for _ in range(size - len(X))]
    if outer is not None:
        outer = list(outer) + [Fraction(1)] * (size - len(outer))

    def phi(r, t):
        if outer is None or t == 0:
            return t
        return real_pow(t, outer[r], precision)

    def block_sequence(select) -> list:
        # inner[r] accumulates X_rc over selected c <= m; terms are refreshed when inner[r] moves
        inner = [[ctx.zero, ctx.zero] for _ in range(size)]
        terms = [ctx.zero] * size
        total, out = ctx.zero, []
        for m in range(size):
            touched = set()
            for r in range(m + 1):
                cols = range(m + 1) if r == m else (m,)
                for c in cols:
                    if select(c):
                        v = X[r][c]
                        if v:
                            inner[r][0 if v > 0 else 1] += abs(v)
                            touched.add(r)
            for r in touched:
                new = phi(r, select.combine(inner[r]))
                total += new - terms[r]
                terms[r] = new
            out.append(total)
        return out

    class _Upper:
        def __call__(self, c):
            return True

        @staticmethod
        def combine(pn):
            return max(pn)

    class _Set:
        def __init__(self, K):
            self.K = set(K)

        def __call__(self, c):
            return c in self.K

        @staticmethod
        def combine(pn):
            return abs(pn[0] - pn[1])

    upper = block_sequence(_Upper())
    cols = size
    colsum = [sum((X[r][c] for r in range(size)), ctx.zero) for c in range(cols)]
    candidates = {
        "all": list(range(cols)),
        "positive_columns": [c for c in range(cols) if colsum[c] > 0],
        "negative_columns": [c for c in range(cols) if colsum[c] < 0],
    }
    kc = min(cfg.k_max + 1, cols)
    if kc:
        F = np.array([[float(v) for v in row[:kc]] for row in X], dtype=float)
        F = np.clip(np.nan_to_num(F), -1e300, 1e300)
        masks = np.array(list(itertools.product((0.0, 1.0), repeat=kc)))
        with np.errstate(over="ignore", invalid="ignore"):
            inner = np.abs(F @ masks.T)
            if outer is not None:
                inner = inner ** np.array([float(e) for e in outer])[:, None]
            totals = np.nan_to_num(inner.sum(axis=0), nan=np.inf)
        best = masks[int(np.argmax(totals))]
        candidates["enumerated_best"] = [c for c in range(kc) if best[c]]

    lower = [ctx.zero] * size
    best_name = None
    for name, K in candidates.items():
        # a set inside an earlier block stays admissible later, so take the running max
        partial = running_sup(block_sequence(_Set(K)))
        if partial and (best_name is None or partial[-1] > lower[-1]):
            best_name = name
        lower = [max(a, b) for a, b in zip(lower, partial)]

    up = assess_bounded(upper, cfg.tol, cfg.blowup, precision)
    ev = {"upper_bound": upper[-1], "lower_bound": lower[-1], "best_candidate": best_name,
          "upper": up.evidence}
    if up.holds:
        return Assessment(Status.HOLDS, ev)
    low = assess_bounded(lower, cfg.tol, cfg.blowup, precision)
    ev["lower"] = low.evidence
    if low.status is Status.FAILS:
        return Assessment(Status.FAILS, dict(ev, checkpoints=low.evidence["checkpoints"]))
    return Assessment(Status.INCONCLUSIVE, ev)


@dataclass
class ColumnLimits:
    status: Status
    alphas: list
    per_column: dict
    checked: int

    def verdict(self, N: int) -> Verdict:
        return Verdict(self.status, N, {},
                       {"limits": {k: a for k, a in enumerate(self.alphas) if k < self.checked},
                        "columns_checked": self.checked,
                        "column_status": self.per_column})


def unestablished_limits(cl: ColumnLimits, N: int) -> Verdict | None:
    """The verdict for a check that shifts by the column limits, when those are not
    established; None when they are. Shifting by unverified candidates could hide growth."""
    if cl.status is Status.HOLDS:
        return None
    # a column growing without bound defeats every choice of alpha
    reason = "column diverges" if cl.status is Status.FAILS else "column limits not established"
    return Verdict(cl.status, N, {}, {"reason": reason, **cl.verdict(N).evidence})


def column_limits(W: Window, cfg: WitnessSearchConfig, precision: int) -> ColumnLimits:
    """lim_n w_nk for each column k <= N/2 (later columns lack a full last quarter).

    The limit candidates alpha_k are the last-row values w_Nk for every column.
    """
    N = W.N
    checked = N // 2 + 1
    statuses, per = [], {}
    for k in range(min(checked, W.ncols)):
        col = [row[k] for row in W.mp]
        a = assess_convergent(col, cfg.tol, cfg.blowup, precision)
        statuses.append(a.status)
        if a.status is not Status.HOLDS:
            per[k] = {"status": a.status.value, **a.evidence}
    alphas = list(W.mp[-1])
    return ColumnLimits(combine_status(statuses), alphas, per, min(checked, W.ncols))


def _require_range(p: ExponentSeq, want: str, what: str):
    kind = p.range_kind()
    if kind != want:
        raise ExponentRangeError(f"{what} needs every p_k {'<= 1' if want == 'low' else '> 1'}, "
                                 f"got a {kind} exponent sequence")


def _conjugates(p: ExponentSeq, count: int) -> list[Fraction]:
    return [p.conjugate(k) for k in range(count)]


# ---------------------------------------------------------------------------
# the base conditions on a single matrix window (target exponent 1)
# ---------------------------------------------------------------------------

def sup_subset_sum(W: Window, p: ExponentSeq, cfg: WitnessSearchConfig,
                   precision: int = DEFAULT_PRECISION, sign: int = -1) -> Verdict:
    """Exists B: sup_K sum_n |sum_{k in K} w_nk B^(sign/p_k)| < inf (sign=+1: for every B)."""
    N = W.N

    def at(B):
        colw = column_weights(p, B, sign, W.ncols, precision)
        X = [[v * c for v, c in zip(row, colw)] for row in W.mp]
        return _verdict(subset_sup(X, None, cfg, precision), N)

    quant = exists_on_grid if sign < 0 else forall_on_grid
    return quant("B", at, cfg, N)


def sup_weighted_rows(W: Window, p: ExponentSeq, cfg: WitnessSearchConfig,
                      precision: int = DEFAULT_PRECISION, sign: int = -1,
                      shift: list | None = None) -> Verdict:
    """Exists B: sup_n sum_k |w_nk - shift_k| B^(sign/p_k) < inf (sign=+1: for every B)."""
    N = W.N

    def at(B):
        colw = column_weights(p, B, sign, W.ncols, precision)
        return _verdict(bounded_sup(weighted_row_sums(W, colw, shift=shift), cfg, precision), N)

    quant = exists_on_grid if sign < 0 else forall_on_grid
    return quant("B", at, cfg, N)


def lemma_c0_to_l1(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    return sup_subset_sum(W, p, cfg, precision)


def lemma_c0_to_c(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    cl = column_limits(W, cfg, precision)
    parts = {
        "row_sup": sup_weighted_rows(W, p, cfg, precision),
        "column_limits": cl.verdict(W.N),
        "shifted_row_sup": sup_weighted_rows(W, p, cfg, precision, shift=cl.alphas),
    }
    return _combine(parts, W.N)


def lemma_c0_to_linf(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    return sup_weighted_rows(W, p, cfg, precision)


def lemma_l_to_l1_high(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    """Exists B: sup_K sum_k |sum_{n in K} w_nk / B|^(p'_k) < inf, for 1 < p_k <= H."""
    _require_range(p, "high", "this condition")
    T = W.transposed()
    pc = _conjugates(p, T.nrows)
    N = W.N

    def at(B):
        X = [[v / B for v in row] for row in T.mp]
        return _verdict(subset_sup(X, pc, cfg, precision), N)

    return exists_on_grid("B", at, cfg, N)


def lemma_l_to_l1_low(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    """sup_K sup_k |sum_{n in K} w_nk|^(p_k) < inf, for 0 < p_k <= 1.

    For a single column the best finite set collects all positive or all
    negative entries, so the supremum is max(positive part, negative part)^p_k.
    """
    _require_range(p, "low", "this condition")
    ctx = context(W.precision)
    pos = [Fraction(0)] * W.ncols
    neg = [Fraction(0)] * W.ncols
    best = ctx.zero
    seq = []
    for row in W.exact:
        for k, v in enumerate(row):
            if v > 0:
                pos[k] += v
            elif v < 0:
                neg[k] -= v
        best = max([best] + [real_pow(to_mpf(max(pos[k], neg[k]), precision), p(k), precision)
                             for k in range(len(row)) if row[k]])
        seq.append(best)
    return _verdict(assess_bounded(seq, cfg.tol, cfg.blowup, precision), W.N)


def lemma_l_to_linf_high(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    """Exists B: sup_n sum_k |w_nk / B|^(p'_k) < inf, for 1 < p_k <= H."""
    _require_range(p, "high", "this condition")
    pc = _conjugates(p, W.ncols)
    N = W.N

    def at(B):
        vals = [sum((real_pow(abs(v) / B, pc[k], precision) for k, v in enumerate(row) if v),
                    context(precision).zero) for row in W.mp]
        return _verdict(bounded_sup(vals, cfg, precision), N)

    return exists_on_grid("B", at, cfg, N)


def lemma_l_to_linf_low(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    """sup_{n,k} |w_nk|^(p_k) < inf, for 0 < p_k <= 1."""
    _require_range(p, "low", "this condition")
    ctx = context(precision)
    vals = [max((real_pow(abs(v), p(k), precision) for k, v in enumerate(row) if v), default=ctx.zero)
            for row in W.mp]
    return _verdict(bounded_sup(vals, cfg, precision), W.N)


def lemma_l_to_c(W, p, cfg, precision=DEFAULT_PRECISION) -> Verdict:
    """The row condition matching the exponent range, plus existence of column limits."""
    kind = p.range_kind()
    if kind == "mixed":
        raise ExponentRangeError("this condition needs every p_k <= 1 or every p_k > 1")
    row = (lemma_l_to_linf_low if kind == "low" else lemma_l_to_linf_high)(W, p, cfg, precision)
    cl = column_limits(W, cfg, precision)
    return _combine({"row_condition": row, "column_limits": cl.verdict(W.N)}, W.N,
                    range=kind)


def _combine(parts: dict[str, Verdict], N: int, **extra) -> Verdict:
    status = combine_status(v.status for v in parts.values())
    return Verdict(status, N, {k: v.witnesses for k, v in parts.items() if v.witnesses},
                   {"components": {k: v.to_dict() for k, v in parts.items()}, **extra})


def series_bounded(terms: list, cfg: WitnessSearchConfig, precision: int) -> Assessment:
    """Is sum_n terms_n finite, for nonnegative terms?"""
    return assess_bounded(list(itertools.accumulate(terms)), cfg.tol, cfg.blowup, precision)


def converges(values: list, cfg: WitnessSearchConfig, precision: int) -> Assessment:
    return assess_convergent(values, cfg.tol, cfg.blowup, precision)


def tends_to_zero(values: list, cfg: WitnessSearchConfig, precision: int) -> Assessment:
    return assess_null(values, cfg.tol, cfg.blowup, precision)
