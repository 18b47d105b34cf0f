"""Paranorms h1, h2, g, g* and truncation-scale membership in the Maddox spaces
c0(p), c(p), linf(p), l(p) and their Fibonacci-difference domains.

Values up to the truncation are exact rationals raised to p_k/M once, at the
requested precision. Beyond the truncation the tail model of the sequence
(or of its transform) supplies closed-form suprema, limits and series bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .numeric import DEFAULT_PRECISION, context, pow_abs, real_pow, to_mpf
from .seq import ExponentSeq, GeometricTail, Seq, Status, TailModel, Verdict, ZeroTail
from .transform import FhatView, ListView, fhat_apply

FAMILIES = ("c0", "c", "linf", "l")
MADDOX, FIBONACCI = "maddox", "fhat"

_FAMILY_ALIASES = {
    "c0": "c0", "c_0": "c0", "c": "c", "linf": "linf", "l_inf": "linf",
    "ellinf": "linf", "l∞": "linf", "ℓ∞": "linf", "l": "l", "ell": "l", "ℓ": "l",
}


@dataclass(frozen=True)
class SpaceId:
    family: str
    layer: str = FIBONACCI

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown space family {self.family!r}")
        if self.layer not in (MADDOX, FIBONACCI):
            raise ValueError(f"unknown layer {self.layer!r}")

    @classmethod
    def parse(cls, text: str) -> SpaceId:
        """Accepts 'c0', 'c0(p)', 'c0_fhat', 'c0(F,p)', 'linf(fhat,p)' and similar."""
        t = text.strip().lower().replace(" ", "").replace("̂", "")
        layer = MADDOX
        for marker in ("_fhat", "(f,p)", "(fhat,p)", "(f)", "(fhat)"):
            if t.endswith(marker):
                t, layer = t[: -len(marker)], FIBONACCI
                break
        else:
            for marker in ("_p", "(p)"):
                if t.endswith(marker):
                    t = t[: -len(marker)]
                    break
        if t not in _FAMILY_ALIASES:
            raise ValueError(f"cannot parse space {text!r}")
        return cls(_FAMILY_ALIASES[t], layer)

    def __str__(self) -> str:
        return f"{self.family}(F,p)" if self.layer == FIBONACCI else f"{self.family}(p)"


@dataclass
class Estimate:
    """A paranorm-type quantity: truncated part, tail contribution, and their combination."""

    value: object
    truncated: object
    exact: bool
    divergent: bool = False
    argmax: int | str | None = None


@dataclass
class MembershipReport:
    verdict: Verdict
    paranorm_estimate: object
    limit_candidate: object = None
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.to_dict(), "paranorm_estimate": self.paranorm_estimate,
                "limit_candidate": self.limit_candidate, "flags": self.flags}


def _view(y):
    if isinstance(y, (list, tuple)):
        return ListView(y)
    return y


def _tail_start(view, p: ExponentSeq, N: int) -> tuple[TailModel, int]:
    model = view.tail_model()
    return model, max(N + 1, model.start, p.tail_start)


def _tail_sup_power(model: TailModel, K: int, p: ExponentSeq, scale: Fraction, precision: int,
                    dev: bool = False):
    """sup_{k>=K} |y_k (- limit)|^(p_k * scale) and whether that is exact."""
    ctx = context(precision)
    if model.eventually_zero or (dev and isinstance(model, (ZeroTail,))):
        return ctx.zero, True
    S = model.sup_dev(K) if dev else model.sup_abs(K)
    if S == 0:
        return ctx.zero, model.exact
    if p.tail_kind == "constant":
        return pow_abs(S, p.tail_sup * scale, precision), model.exact
    # p_k decreases to 0 along the tail: |y_k|^(p_k s) -> 1 unless y vanishes
    if S <= 1:
        if model.nonvanishing():
            return ctx.one, True
        return ctx.one, False
    return max(ctx.one, pow_abs(S, p(K) * scale, precision)), False


def h1_estimate(y, p: ExponentSeq, N: int, precision: int = DEFAULT_PRECISION,
                include_tail: bool = True) -> Estimate:
    """sup_k |y_k|^(p_k/M): exact terms through the truncation, closed-form tail after."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    ctx = context(precision)
    view = _view(y)
    model, K = _tail_start(view, p, N)
    M = p.M
    last = K - 1 if include_tail else N
    best, arg = ctx.zero, None
    truncated = ctx.zero
    for k, yk in enumerate(view.values(last)):
        v = pow_abs(yk, p(k) / M, precision)
        if v > best:
            best, arg = v, k
        if k <= N and v > truncated:
            truncated = v
    exact = True
    if include_tail:
        tail, exact = _tail_sup_power(model, K, p, 1 / M, precision)
        if tail > best:
            best, arg = tail, "tail"
    return Estimate(best, truncated, exact, argmax=arg)


def h2_estimate(y, p: ExponentSeq, N: int, precision: int = DEFAULT_PRECISION,
                include_tail: bool = True) -> Estimate:
    """(sum_k |y_k|^p_k)^(1/M) with a geometric closed form (or bound) for the tail."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    ctx = context(precision)
    view = _view(y)
    model, K = _tail_start(view, p, N)
    M = p.M
    last = K - 1 if include_tail else N
    total = ctx.zero
    truncated = ctx.zero
    for k, yk in enumerate(view.values(last)):
        total += pow_abs(yk, p(k), precision)
        if k == N:
            truncated = total
    if last < N:
        truncated = total
    exact, divergent = True, False
    if include_tail and not model.eventually_zero:
        if model.limit is None:
            exact, total = False, ctx.inf
        elif model.limit != 0:
            divergent, total = True, ctx.inf
        elif p.tail_kind == "constant":
            amp, ratio = model.envelope(K)
            P = p.tail_sup
            if amp != 0:
                total += pow_abs(amp, P, precision) / (1 - pow_abs(ratio, P, precision))
            exact = isinstance(model, GeometricTail)
        elif model.nonvanishing():
            divergent, total = True, ctx.inf
        else:
            exact, total = False, ctx.inf
    inv_M = 1 / M
    value = total if ctx.isinf(total) else real_pow(total, inv_M, precision)
    return Estimate(value, real_pow(truncated, inv_M, precision), exact, divergent)


def h1(y, p: ExponentSeq, N: int, precision: int = DEFAULT_PRECISION, include_tail: bool = True):
    return h1_estimate(y, p, N, precision, include_tail).value


def h2(y, p: ExponentSeq, N: int, precision: int = DEFAULT_PRECISION, include_tail: bool = True):
    return h2_estimate(y, p, N, precision, include_tail).value


def _fhat_view(x, N: int):
    if isinstance(x, Seq):
        return FhatView(x)
    return ListView(fhat_apply(list(x), N))


def g_paranorm(x: Seq | Sequence, p: ExponentSeq, N: int, precision: int = DEFAULT_PRECISION,
               include_tail: bool = True):
    """g(x) = sup_k |(F x)_k|^(p_k/M). A list input is read as the finite data x_0..x_N."""
    return h1(_fhat_view(x, N), p, N, precision, include_tail)


def gstar_paranorm(x: Seq | Sequence, p: ExponentSeq, N: int, precision: int = DEFAULT_PRECISION,
                   include_tail: bool = True):
    """g*(x) = (sum_k |(F x)_k|^p_k)^(1/M)."""
    return h2(_fhat_view(x, N), p, N, precision, include_tail)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def _last_quarter(N: int) -> range:
    q = max(1, math.ceil(N / 4))
    return range(N - q + 1, N + 1)


def classify(x: Seq, space: SpaceId | str, p: ExponentSeq, N: int, tol: float = 1e-12,
             precision: int = DEFAULT_PRECISION) -> MembershipReport:
    """Three-valued membership of x in `space` at truncation N.

    Decisions rest on the tail model (limit, supremum, geometric envelope);
    the truncated data supplies the reported estimate and a Cauchy-style
    limit candidate for c(p)-type spaces.
    """
    if N < 1:
        raise ValueError("classify needs N >= 1")
    if isinstance(space, str):
        space = SpaceId.parse(space)
    ctx = context(precision)
    view = FhatView(x) if space.layer == FIBONACCI else x
    model, K = _tail_start(view, p, N)
    ys = view.values(N)
    tol_mpf = ctx.mpf(tol)
    flags = {"space": str(space), "tail_model": model.describe()}
    if space.family in ("c", "linf"):
        flags["paranorm_guarantee"] = p.inf_p > 0
    evidence: dict = {}
    limit = None

    if space.family == "l":
        est = h2_estimate(view, p, N, precision)
        evidence.update(sum_estimate=est.value, tail_exact=est.exact)
        if est.divergent:
            status = Status.FAILS
            evidence["reason"] = "tail terms do not vanish"
        elif not ctx.isinf(est.value):
            status = Status.HOLDS
        else:
            status = Status.INCONCLUSIVE
        estimate = est.truncated
    else:
        est = h1_estimate(view, p, N, precision)
        estimate = est.truncated
        evidence.update(sup_estimate=est.value, tail_exact=est.exact)
        tail_terms = [pow_abs(ys[n], p(n), precision) for n in _last_quarter(N)]
        if space.family == "linf":
            # every representable tail is bounded
            status = Status.HOLDS
        elif space.family == "c0":
            evidence["last_quarter_max"] = max(tail_terms)
            status = _null_status(model, p, dev=False)
            if model.limit is not None:
                evidence["tail_limit"] = model.limit
        else:
            candidate = ys[N]
            devs = [pow_abs(ys[n] - candidate, p(n), precision) for n in _last_quarter(N)]
            evidence["cauchy_candidate"] = candidate
            evidence["cauchy_accepted"] = max(devs) < tol_mpf
            status = Status.INCONCLUSIVE
            if model.limit is not None:
                status = _null_status(model, p, dev=True)
                limit = to_mpf(model.limit, precision)
                evidence["tail_limit"] = model.limit
            elif evidence["cauchy_accepted"]:
                limit = to_mpf(candidate, precision)
    verdict = Verdict(status, N, witnesses={}, evidence=evidence)
    return MembershipReport(verdict, estimate, limit, flags)


def _null_status(model: TailModel, p: ExponentSeq, dev: bool) -> Status:
    """Does |y_k (- limit)|^p_k tend to zero?"""
    if model.limit is None:
        return Status.INCONCLUSIVE
    if not dev and model.limit != 0:
        return Status.FAILS
    if model.eventually_zero or (dev and model.sup_dev(model.start) == 0):
        return Status.HOLDS
    if p.tail_kind == "constant":
        # geometric envelope of the deviation, bounded exponent from below
        return Status.HOLDS
    return Status.FAILS if model.nonvanishing() else Status.INCONCLUSIVE


def absolute_property_witness(p: ExponentSeq, precision: int = DEFAULT_PRECISION,
                              x: Seq | None = None):
    """(x, g(x), g(|x|)) for x = (1, -1, 0, ...), where the two paranorms differ."""
    if x is None:
        x = Seq.finite([1, -1])
    N = len(x.prefix) + 2
    return x, g_paranorm(x, p, N, precision), g_paranorm(abs(x), p, N, precision)
