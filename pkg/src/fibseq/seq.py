"""Sequences as an explicit prefix plus an analyzable tail, exponent sequences, verdicts.

A `Seq` is x_0, ..., x_{L-1} given explicitly and x_k for k >= L given by a
`TailSpec`. Tails are restricted to zero, constant and geometric shapes so
that suprema, limits and series over the infinite index set have closed forms.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import ExponentRangeError, SchemaError

ExactScalar = Fraction

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Parse a JSON integer or a decimal-free "p/q" string."""
    if isinstance(value, bool):
        raise SchemaError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise SchemaError(f"rationals must be integers or 'p/q' strings, got {value!r}")
    m = _RATIONAL.match(value)
    if not m:
        raise SchemaError(f"malformed rational {value!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise SchemaError(f"zero denominator in {value!r}")
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailSpec:
    kind: str = "zero"
    c: Fraction = Fraction(0)
    r: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "geometric"):
            raise SchemaError(f"unknown tail kind {self.kind!r}")
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "r", Fraction(self.r))
        if self.kind == "geometric" and abs(self.r) >= 1:
            raise SchemaError(f"geometric tail needs |r| < 1, got r = {self.r}")

    @classmethod
    def zero(cls) -> TailSpec:
        return cls("zero")

    @classmethod
    def constant(cls, c) -> TailSpec:
        return cls("constant", Fraction(c))

    @classmethod
    def geometric(cls, c, r) -> TailSpec:
        return cls("geometric", Fraction(c), Fraction(r))

    def value(self, offset: int) -> Fraction:
        if self.kind == "zero":
            return Fraction(0)
        if self.kind == "constant":
            return self.c
        return self.c * self.r**offset

    def normalized(self) -> TailSpec:
        if self.kind == "constant" and self.c == 0:
            return TailSpec.zero()
        if self.kind == "geometric" and self.c == 0:
            return TailSpec.zero()
        return self

    def shifted(self, by: int) -> TailSpec:
        """The same tail re-anchored `by` indices later."""
        if self.kind == "geometric":
            return TailSpec.geometric(self.c * self.r**by, self.r)
        return self

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind in ("constant", "geometric"):
            d["c"] = str(self.c)
        if self.kind == "geometric":
            d["r"] = str(self.r)
        return d


class TailModel:
    """Closed-form knowledge about y_k for k >= start.

    `sup_abs` and `sup_dev` are exact suprema when `exact` is true and upper
    bounds otherwise. `envelope(K)` gives (amp, ratio) with
    |y_k - limit| <= amp * ratio**(k - K) for every k >= K.
    """

    start: int = 0
    limit: Fraction | None = None
    exact: bool = True
    eventually_zero: bool = False

    def sup_abs(self, K: int) -> Fraction:
        raise NotImplementedError

    def sup_dev(self, K: int) -> Fraction:
        raise NotImplementedError

    def envelope(self, K: int) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    def nonvanishing(self) -> bool:
        """True when y_k - limit is nonzero for every k >= start."""
        return False

    def describe(self) -> dict:
        return {"model": type(self).__name__, "start": self.start,
                "limit": self.limit, "exact": self.exact}


class ZeroTail(TailModel):
    def __init__(self, start: int):
        self.start = start
        self.limit = Fraction(0)
        self.eventually_zero = True

    def sup_abs(self, K):
        return Fraction(0)

    def sup_dev(self, K):
        return Fraction(0)

    def envelope(self, K):
        return Fraction(0), Fraction(0)


class ConstantTail(TailModel):
    def __init__(self, start: int, c: Fraction):
        self.start = start
        self.c = Fraction(c)
        self.limit = self.c

    def sup_abs(self, K):
        return abs(self.c)

    def sup_dev(self, K):
        return Fraction(0)

    def envelope(self, K):
        return Fraction(0), Fraction(0)


class GeometricTail(TailModel):
    """y_k = c * r**(k - start); sums of |y_k|**P are exact geometric series."""

    def __init__(self, start: int, c: Fraction, r: Fraction):
        self.start = self.anchor = start
        self.c = Fraction(c)
        self.r = Fraction(r)
        self.limit = Fraction(0)

    def sup_abs(self, K):
        return abs(self.c) * abs(self.r) ** (K - self.anchor)

    sup_dev = sup_abs

    def envelope(self, K):
        return self.sup_abs(K), abs(self.r)

    def nonvanishing(self):
        return self.c != 0 and self.r != 0


# ---------------------------------------------------------------------------
# Seq
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Seq:
    prefix: tuple[Fraction, ...] = ()
    tail: TailSpec = field(default_factory=TailSpec.zero)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(Fraction(v) for v in self.prefix))

    # constructors -----------------------------------------------------------
    @classmethod
    def finite(cls, values: Iterable) -> Seq:
        return cls(tuple(values), TailSpec.zero())

    @classmethod
    def constant(cls, c) -> Seq:
        return cls((), TailSpec.constant(c))

    @classmethod
    def geometric(cls, c, r) -> Seq:
        return cls((), TailSpec.geometric(c, r))

    @classmethod
    def unit(cls, k: int) -> Seq:
        """e^(k): one at index k, zero elsewhere."""
        return cls.finite([0] * k + [1])

    # evaluation -------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.prefix)

    def eval(self, k: int) -> Fraction:
        if k < 0:
            raise IndexError("sequence index must be nonnegative")
        L = len(self.prefix)
        if k < L:
            return self.prefix[k]
        return self.tail.value(k - L)

    __call__ = eval

    def values(self, N: int) -> list[Fraction]:
        """x_0, ..., x_N."""
        return [self.eval(k) for k in range(N + 1)]

    def truncated_equal(self, other: Seq, N: int) -> bool:
        return all(self.eval(k) == other.eval(k) for k in range(N + 1))

    def support_bound(self) -> int | None:
        """Largest index with a nonzero value, -1 for the zero sequence, None if infinite."""
        if self.tail.normalized().kind != "zero":
            return None
        for k in range(len(self.prefix) - 1, -1, -1):
            if self.prefix[k] != 0:
                return k
        return -1

    def tail_model(self) -> TailModel:
        L = len(self.prefix)
        t = self.tail.normalized()
        if t.kind == "zero":
            return ZeroTail(L)
        if t.kind == "constant":
            return ConstantTail(L, t.c)
        return GeometricTail(L, t.c, t.r)

    # arithmetic -------------------------------------------------------------
    def extended(self, L: int) -> Seq:
        """Equal sequence whose explicit prefix has length max(L, len(self))."""
        cur = len(self.prefix)
        if L <= cur:
            return self
        extra = tuple(self.eval(k) for k in range(cur, L))
        return Seq(self.prefix + extra, self.tail.shifted(L - cur))

    def __add__(self, other: Seq) -> Seq:
        if not isinstance(other, Seq):
            return NotImplemented
        L = max(len(self.prefix), len(other.prefix))
        a, b = self.extended(L), other.extended(L)
        prefix = tuple(u + v for u, v in zip(a.prefix, b.prefix))
        return Seq(prefix, _add_tails(a.tail.normalized(), b.tail.normalized()))

    def scale(self, alpha) -> Seq:
        alpha = Fraction(alpha)
        t = self.tail
        if t.kind == "zero":
            tail = t
        elif t.kind == "constant":
            tail = TailSpec.constant(alpha * t.c)
        else:
            tail = TailSpec.geometric(alpha * t.c, t.r)
        return Seq(tuple(alpha * v for v in self.prefix), tail.normalized())

    def __rmul__(self, alpha) -> Seq:
        return self.scale(alpha)

    def __neg__(self) -> Seq:
        return self.scale(-1)

    def __sub__(self, other: Seq) -> Seq:
        return self + (-other)

    def __abs__(self) -> Seq:
        t = self.tail
        if t.kind == "geometric" and t.r < 0:
            raise ValueError("|x| of an alternating geometric tail is not representable")
        if t.kind == "zero":
            tail = t
        elif t.kind == "constant":
            tail = TailSpec.constant(abs(t.c))
        else:
            tail = TailSpec.geometric(abs(t.c), t.r)
        return Seq(tuple(abs(v) for v in self.prefix), tail)

    def to_dict(self) -> dict:
        return {"prefix": [str(v) for v in self.prefix], "tail": self.tail.to_dict()}


def _add_tails(s: TailSpec, t: TailSpec) -> TailSpec:
    if s.kind == "zero":
        return t
    if t.kind == "zero":
        return s
    if s.kind == t.kind == "constant":
        return TailSpec.constant(s.c + t.c).normalized()
    if s.kind == t.kind == "geometric" and s.r == t.r:
        return TailSpec.geometric(s.c + t.c, s.r).normalized()
    raise ValueError(f"sum of {s.kind} and {t.kind} tails is not representable")


# ---------------------------------------------------------------------------
# exponent sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentSeq:
    """A bounded, strictly positive exponent sequence (p_k) with cached inf, H and M."""

    seq: Seq

    def __post_init__(self):
        s = self.seq
        if any(v <= 0 for v in s.prefix):
            raise ExponentRangeError("exponents must be strictly positive")
        t = s.tail
        if t.kind == "zero" or t.c <= 0:
            raise ExponentRangeError("exponent tail must be strictly positive")
        if t.kind == "geometric" and not (0 < t.r < 1):
            raise ExponentRangeError("geometric exponent tail needs 0 < r < 1")
        tail_sup = t.c
        tail_inf = t.c if t.kind == "constant" else Fraction(0)
        H = max([*s.prefix, tail_sup])
        inf_p = min([*s.prefix, tail_inf])
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "inf_p", inf_p)
        object.__setattr__(self, "M", max(Fraction(1), H))

    @classmethod
    def constant(cls, c) -> ExponentSeq:
        return cls(Seq.constant(c))

    @classmethod
    def of(cls, prefix: Sequence, tail: TailSpec) -> ExponentSeq:
        return cls(Seq(tuple(prefix), tail))

    def __call__(self, k: int) -> Fraction:
        return self.seq.eval(k)

    value = __call__

    @property
    def tail_start(self) -> int:
        return len(self.seq.prefix)

    @property
    def tail_kind(self) -> str:
        return self.seq.tail.kind

    @property
    def tail_sup(self) -> Fraction:
        return self.seq.tail.c

    def conjugate(self, k: int) -> Fraction:
        """p'_k with 1/p_k + 1/p'_k = 1; defined only where p_k > 1."""
        p = self(k)
        if p <= 1:
            raise ExponentRangeError(f"conjugate exponent undefined at k={k} (p_k = {p} <= 1)")
        return p / (p - 1)

    def range_kind(self) -> str:
        """'low' if every p_k <= 1, 'high' if every p_k > 1, else 'mixed'."""
        if self.H <= 1:
            return "low"
        if self.inf_p > 1:
            return "high"
        return "mixed"

    def is_nondecreasing(self) -> bool:
        s = self.seq
        vals = list(s.prefix)
        if any(b < a for a, b in zip(vals, vals[1:])):
            return False
        if s.tail.kind != "constant":
            return False
        return not vals or s.tail.c >= vals[-1]

    def to_dict(self) -> dict:
        return self.seq.to_dict()


def exponent_stats(p: ExponentSeq, N: int) -> tuple[Fraction, Fraction, Fraction]:
    """(min over k <= N, H, M) with H the exact supremum over all k."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    return min(p(k) for k in range(N + 1)), p.H, p.M


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

class Status(str, enum.Enum):
    HOLDS = "holds_at_truncation"
    FAILS = "fails_at_truncation"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Verdict:
    status: Status
    truncation: int
    witnesses: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_dict(self) -> dict:
        return {"status": self.status.value, "truncation": self.truncation,
                "witnesses": self.witnesses, "evidence": self.evidence}


def combine_status(statuses: Iterable[Status]) -> Status:
    statuses = list(statuses)
    if any(s is Status.FAILS for s in statuses):
        return Status.FAILS
    if all(s is Status.HOLDS for s in statuses):
        return Status.HOLDS
    return Status.INCONCLUSIVE


def combine(parts: dict[str, Verdict], truncation: int, **evidence) -> Verdict:
    """Conjunction: all hold -> holds, any fails -> fails, else inconclusive."""
    status = combine_status(v.status for v in parts.values())
    return Verdict(
        status,
        truncation,
        witnesses={name: v.witnesses for name, v in parts.items()},
        evidence={"components": {name: v.to_dict() for name, v in parts.items()}, **evidence},
    )


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _load(doc) -> dict:
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("sequence document must be a JSON object")
    return doc


def _parse_tail(t) -> TailSpec:
    if not isinstance(t, dict) or "kind" not in t:
        raise SchemaError("tail must be an object with a 'kind'")
    kind = t["kind"]
    if kind == "zero":
        return TailSpec.zero()
    if kind == "constant":
        return TailSpec.constant(parse_rational(t.get("c", 0)))
    if kind == "geometric":
        if "r" not in t:
            raise SchemaError("geometric tail needs 'r'")
        return TailSpec.geometric(parse_rational(t.get("c", 1)), parse_rational(t["r"]))
    raise SchemaError(f"unknown tail kind {kind!r}")


def parse_seq(doc) -> Seq:
    d = _load(doc)
    unknown = set(d) - {"prefix", "tail"}
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}")
    prefix = d.get("prefix", [])
    if not isinstance(prefix, list):
        raise SchemaError("'prefix' must be a list")
    return Seq(tuple(parse_rational(v) for v in prefix), _parse_tail(d.get("tail", {"kind": "zero"})))


def parse_exponent_seq(doc) -> ExponentSeq:
    d = _load(doc)
    # shorthand: {"constant": "3/2"}
    if set(d) == {"constant"}:
        return ExponentSeq.constant(parse_rational(d["constant"]))
    return ExponentSeq(parse_seq(d))


def serialize_seq(s: Seq | ExponentSeq) -> str:
    return json.dumps(s.to_dict(), sort_keys=True)
