"""Finite-data tests for boundedness, convergence and decay to zero.

Every test looks at a sequence s_0..s_N and returns a status with the
evidence it used. The rules, in order:

* stabilized: the last quarter moves by at most tol (relative) -> holds
* blow-up: checkpoints strictly increase and the final value exceeds the
  blow-up threshold -> fails
* geometric: the increments of the last two eighths shrink at a per-index
  rate of at most 0.9 -> holds, with the extrapolated remainder reported
* otherwise inconclusive
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numeric import DEFAULT_PRECISION, context
from .seq import Status

CONTRACTION_MAX = 0.9


def checkpoints(N: int) -> list[int]:
    return sorted({max(0, math.ceil(N * f / 4)) for f in (1, 2, 3)} | {N})


def _last_quarter_start(N: int) -> int:
    return N - max(1, math.ceil(N / 4))


@dataclass
class Assessment:
    status: Status
    evidence: dict

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS


def _mp(values, precision):
    ctx = context(precision)
    return [v if hasattr(v, "_mpf_") else ctx.mpf(v) if not hasattr(v, "numerator") else
            ctx.mpf(v.numerator) / v.denominator for v in values]


def _contraction(increments, N: int):
    """Per-index contraction rate of |increments| over the last two eighths, or None."""
    w = max(2, math.ceil(N / 8))
    if N - 2 * w < 0:
        return None, w
    recent = max(abs(d) for d in increments[N - w + 1: N + 1])
    before = max(abs(d) for d in increments[N - 2 * w + 1: N - w + 1])
    if before == 0:
        return (0.0 if recent == 0 else None), w
    rate = float(recent / before) ** (1.0 / w)
    return rate, w


def assess_bounded(values, tol: float = 1e-12, blowup: float = 1e30,
                   precision: int = DEFAULT_PRECISION) -> Assessment:
    """Is the nondecreasing sequence R_0 <= R_1 <= ... bounded?"""
    ctx = context(precision)
    R = _mp(values, precision)
    N = len(R) - 1
    cps = checkpoints(N)
    ev = {"checkpoints": {n: R[n] for n in cps}, "final": R[N]}
    if ctx.isinf(R[N]):
        ev["method"] = "infinite_term"
        return Assessment(Status.FAILS, ev)
    s = _last_quarter_start(N)
    if N >= 1 and R[N] - R[max(s, 0)] <= tol * max(1, abs(R[N])):
        ev["method"] = "stabilized"
        return Assessment(Status.HOLDS, ev)
    cp_vals = [R[n] for n in cps]
    if len(cps) >= 3 and R[N] > blowup and all(a < b for a, b in zip(cp_vals, cp_vals[1:])):
        ev["method"] = "monotone_divergence"
        return Assessment(Status.FAILS, ev)
    inc = [ctx.zero] + [R[n] - R[n - 1] for n in range(1, N + 1)]
    rate, w = _contraction(inc, N)
    if rate is not None and rate <= CONTRACTION_MAX:
        q = ctx.mpf(rate) ** w
        remainder = (R[N] - R[N - w]) * q / (1 - q) if q < 1 else ctx.zero
        ev.update(method="geometric_extrapolation", contraction=rate, bound=R[N] + remainder)
        return Assessment(Status.HOLDS, ev)
    ev["method"] = "undecided"
    return Assessment(Status.INCONCLUSIVE, ev)


def running_sup(values) -> list:
    out, best = [], None
    for v in values:
        best = v if best is None or v > best else best
        out.append(best)
    return out


def assess_convergent(values, tol: float = 1e-12, blowup: float = 1e30,
                      precision: int = DEFAULT_PRECISION) -> Assessment:
    """Does s_n converge? Limit candidate is s_N."""
    ctx = context(precision)
    s = _mp(values, precision)
    N = len(s) - 1
    cps = checkpoints(N)
    limit = s[N]
    ev = {"checkpoints": {n: s[n] for n in cps}, "limit_candidate": limit}
    start = max(_last_quarter_start(N), 0)
    dev = max(abs(s[n] - limit) for n in range(start, N + 1))
    ev["last_quarter_deviation"] = dev
    if dev <= tol * max(1, abs(limit)):
        ev["method"] = "cauchy"
        return Assessment(Status.HOLDS, ev)
    mags = [abs(s[n]) for n in cps]
    if len(cps) >= 3 and abs(limit) > blowup and all(a < b for a, b in zip(mags, mags[1:])):
        ev["method"] = "monotone_divergence"
        return Assessment(Status.FAILS, ev)
    inc = [ctx.zero] + [s[n] - s[n - 1] for n in range(1, N + 1)]
    rate, w = _contraction(inc, N)
    if rate is not None and rate <= CONTRACTION_MAX:
        q = ctx.mpf(rate)
        recent = max(abs(d) for d in inc[N - w + 1: N + 1])
        ev.update(method="geometric_extrapolation", contraction=rate,
                  error_bound=recent * q / (1 - q) if q < 1 else ctx.zero)
        return Assessment(Status.HOLDS, ev)
    ev["method"] = "undecided"
    return Assessment(Status.INCONCLUSIVE, ev)


def assess_null(values, tol: float = 1e-12, blowup: float = 1e30,
                precision: int = DEFAULT_PRECISION) -> Assessment:
    """Does the nonnegative sequence s_n tend to zero?"""
    s = _mp(values, precision)
    N = len(s) - 1
    start = max(_last_quarter_start(N), 0)
    tail_max = max(s[start: N + 1])
    if tail_max <= tol:
        return Assessment(Status.HOLDS, {"method": "below_tol", "last_quarter_max": tail_max})
    conv = assess_convergent(s, tol, blowup, precision)
    ev = dict(conv.evidence, last_quarter_max=tail_max)
    if conv.status is Status.FAILS:
        return Assessment(Status.FAILS, ev)
    if conv.status is Status.HOLDS:
        limit = conv.evidence["limit_candidate"]
        bound = conv.evidence.get("error_bound", 0)
        if abs(limit) - bound > tol:
            ev["method"] = "nonzero_limit"
            return Assessment(Status.FAILS, ev)
        return Assessment(Status.HOLDS, ev)
    return Assessment(Status.INCONCLUSIVE, ev)
