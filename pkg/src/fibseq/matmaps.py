"""Matrix maps out of the Fibonacci difference spaces.

For A acting on x = V y the relevant matrices are

    e_nk      = sum_{j>=k} a_nj v_jk
    e^(n)_mk  = sum_{j=k}^{m} a_nj v_jk      (k <= m)

With the Fibonacci inverse v_jk = f_{j+1}^2 / (f_k f_{k+1}) both are weighted
suffix sums of a row of A, computed exactly. Only row-finite A is accepted,
so every e_nk is a finite sum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .conditions import (
    Window,
    WitnessSearchConfig,
    _combine,
    _verdict,
    bounded_sup,
    column_limits,
    column_weights,
    converges,
    exists_on_grid,
    forall_on_grid,
    lemma_c0_to_c,
    lemma_c0_to_l1,
    lemma_c0_to_linf,
    lemma_l_to_c,
    lemma_l_to_l1_high,
    lemma_l_to_l1_low,
    lemma_l_to_linf_high,
    lemma_l_to_linf_low,
    tends_to_zero,
    unestablished_limits,
    weighted_row_sums,
)
from .errors import SchemaError, UnsupportedMatrixError, UnsupportedPairError
from .fib import fib
from .numeric import DEFAULT_PRECISION, context, pow_abs, real_pow, to_mpf
from .seq import ExponentSeq, Status, Verdict, combine_status, parse_rational
from .spaces import FIBONACCI, SpaceId
from .transform import fhat_entry, inverse_entry

BANDED, ROW_FINITE, GENERAL = "banded", "rowfinite", "general"


class Matrix:
    """An infinite matrix given row by row. `row(n)` maps column -> nonzero entry."""

    structure = ROW_FINITE
    name = "matrix"

    def row(self, n: int) -> dict[int, Fraction]:
        raise NotImplementedError

    def entry(self, n: int, k: int) -> Fraction:
        return self.row(n).get(k, Fraction(0))

    def support_bound(self, n: int) -> int:
        """Largest column with a nonzero entry in row n, -1 for an empty row."""
        r = self.row(n)
        return max(r) if r else -1

    def describe(self) -> dict:
        return {"name": self.name, "structure": self.structure}


class _Builtin(Matrix):
    def __init__(self, name: str, structure: str, row: Callable[[int], dict]):
        self.name = name
        self.structure = structure
        self._row = row

    def row(self, n):
        return self._row(n)


def _fhat_row(n):
    r = {n: fhat_entry(n, n)}
    if n:
        r[n - 1] = fhat_entry(n, n - 1)
    return r


class _AllOnes(Matrix):
    """a_nk = 1 for every k: no row terminates."""

    name = "ones"
    structure = GENERAL

    def row(self, n):
        raise UnsupportedMatrixError("rows of the all-ones matrix are infinite")

    def entry(self, n, k):
        return Fraction(1)

    def support_bound(self, n):
        raise UnsupportedMatrixError("rows of the all-ones matrix are infinite")


BUILTINS: dict[str, Matrix] = {
    "fhat": _Builtin("fhat", BANDED, _fhat_row),
    "identity": _Builtin("identity", BANDED, lambda n: {n: Fraction(1)}),
    "zero": _Builtin("zero", BANDED, lambda n: {}),
    "inverse": _Builtin("inverse", ROW_FINITE,
                        lambda n: {k: inverse_entry(n, k) for k in range(n + 1)}),
    "ones": _AllOnes(),
}


class ExplicitMatrix(Matrix):
    """Rows given as lists; rows past the end are zero."""

    def __init__(self, rows: list[dict[int, Fraction]], structure: str = ROW_FINITE,
                 name: str = "explicit"):
        self.rows = [{k: Fraction(v) for k, v in r.items() if v != 0} for r in rows]
        self.structure = structure
        self.name = name

    def row(self, n):
        return self.rows[n] if n < len(self.rows) else {}

    def band_width(self) -> int:
        return max((abs(k - n) for n, r in enumerate(self.rows) for k in r), default=0)


def parse_matrix(doc) -> Matrix:
    """{"kind": "banded"|"rowfinite"|"builtin", "name": ..., "rows": [[{"k", "v"}, ...], ...]}"""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaError("matrix must be an object with a 'kind'")
    unknown = set(doc) - {"kind", "name", "rows"}
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}")
    kind = doc["kind"]
    if kind == "builtin":
        name = doc.get("name")
        if name not in BUILTINS:
            raise SchemaError(f"unknown builtin matrix {name!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[name]
    if kind not in (BANDED, ROW_FINITE):
        raise SchemaError(f"unknown matrix kind {kind!r}")
    rows = doc.get("rows")
    if not isinstance(rows, list):
        raise SchemaError("'rows' must be a list of rows")
    parsed = []
    for n, row in enumerate(rows):
        if not isinstance(row, list):
            raise SchemaError(f"row {n} must be a list of entries")
        entries: dict[int, Fraction] = {}
        for e in row:
            if not isinstance(e, dict) or set(e) != {"k", "v"}:
                raise SchemaError(f"row {n}: entries must be objects with exactly 'k' and 'v'")
            k = e["k"]
            if isinstance(k, bool) or not isinstance(k, int) or k < 0:
                raise SchemaError(f"row {n}: column index must be a nonnegative integer")
            if k in entries:
                raise SchemaError(f"row {n}: duplicate column {k}")
            entries[k] = parse_rational(e["v"])
        parsed.append(entries)
    return ExplicitMatrix(parsed, kind, doc.get("name") or kind)


def _require_row_finite(A: Matrix):
    if A.structure == GENERAL:
        raise UnsupportedMatrixError(
            f"matrix {A.name!r} has infinite rows; only banded or row-finite matrices are supported")


# ---------------------------------------------------------------------------
# E and E^(n)
# ---------------------------------------------------------------------------

class EMatrices:
    """Exact e_nk and e^(n)_mk for a row-finite A and a lower-triangular inverse."""

    def __init__(self, A: Matrix, inverse: Matrix | None = None):
        _require_row_finite(A)
        self.A = A
        self.inverse = inverse
        self._rows: dict[int, list[Fraction]] = {}

    def _v(self, j: int, k: int) -> Fraction:
        return inverse_entry(j, k) if self.inverse is None else self.inverse.entry(j, k)

    def support(self, n: int) -> int:
        return self.A.support_bound(n)

    def truncated_row(self, n: int, m: int) -> list[Fraction]:
        """e^(n)_mk for k = 0..m."""
        if m < 0:
            return []
        a = {j: v for j, v in self.A.row(n).items() if j <= m}
        if self.inverse is None:
            # v_jk = f_{j+1}^2 w_k, so the inner sum is a suffix sum of a_nj f_{j+1}^2
            out, acc = [Fraction(0)] * (m + 1), Fraction(0)
            for k in range(m, -1, -1):
                if k in a:
                    acc += a[k] * fib(k + 1) ** 2
                if acc:
                    out[k] = acc / (fib(k) * fib(k + 1))
            return out
        return [sum((v * self._v(j, k) for j, v in a.items() if j >= k), Fraction(0))
                for k in range(m + 1)]

    def row(self, n: int) -> list[Fraction]:
        """e_nk for k = 0..support(n): the stabilized truncated row."""
        if n not in self._rows:
            self._rows[n] = self.truncated_row(n, self.support(n))
        return self._rows[n]

    def e(self, n: int, k: int) -> Fraction:
        r = self.row(n)
        return r[k] if k < len(r) else Fraction(0)

    def e_trunc(self, n: int, m: int, k: int) -> Fraction:
        if k > m:
            return Fraction(0)
        return self.truncated_row(n, m)[k]

    def window(self, N: int, precision: int = DEFAULT_PRECISION) -> Window:
        """Rows n <= N in full, every row padded to a common width."""
        rows = [list(self.row(n)) for n in range(N + 1)]
        width = max(N + 1, max(len(r) for r in rows))
        return Window([r + [Fraction(0)] * (width - len(r)) for r in rows], precision)

    def is_identity(self, N: int) -> bool:
        W = self.window(N)
        return all(v == (1 if n == k else 0) for n, row in enumerate(W.exact) for k, v in enumerate(row))


def build_e_matrices(A: Matrix, N: int, inverse: Matrix | None = None) -> EMatrices:
    """E for A, with rows 0..N computed eagerly."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    E = EMatrices(A, inverse)
    for n in range(N + 1):
        E.row(n)
    return E


# ---------------------------------------------------------------------------
# conditions
# ---------------------------------------------------------------------------

MT_IDS = tuple(f"mt{i}" for i in range(23, 42))
LEMMA_IDS = ("L2.3", "L2.4", "L2.5", "L2.6i", "L2.6ii", "L2.7i", "L2.7ii", "L2.8")


def normalize_condition_id(cid: str) -> str:
    """'mt30', '3.10' and '(3.10)' name the same condition; lemma ids pass through."""
    t = str(cid).strip().strip("()")
    if t in MT_IDS or t in LEMMA_IDS:
        return t
    if t.startswith("3."):
        try:
            num = int(t[2:])
        except ValueError:
            num = -1
        if 3 <= num <= 21:
            return f"mt{num + 20}"
    raise SchemaError(f"unknown condition id {cid!r}")


@dataclass
class _Ctx:
    E: EMatrices
    A: Matrix
    p: ExponentSeq
    q: ExponentSeq
    cfg: WitnessSearchConfig
    precision: int
    _window: Window | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.cfg.truncation

    def window(self) -> Window:
        if self._window is None:
            self._window = self.E.window(self.N, self.precision)
        return self._window


def _row_finite_verdict(c: _Ctx, what: str, values: dict | None = None) -> Verdict:
    supports = {n: c.E.support(n) for n in range(c.N + 1)}
    ev = {"reason": f"row-finite A: {what}", "row_support": supports}
    if values:
        ev.update(values)
    return Verdict(Status.HOLDS, c.N, {}, ev)


def _mt23(c: _Ctx) -> Verdict:
    # e^(n)_mk is constant in m once m passes the row support; confirm exactly
    mismatches = []
    for n in range(c.N + 1):
        s = c.E.support(n)
        for m in (s, s + 1, s + 5):
            row = c.E.truncated_row(n, m)
            if any(row[k] != c.E.e(n, k) for k in range(len(row))):
                mismatches.append((n, m))
    if mismatches:
        return Verdict(Status.FAILS, c.N, {}, {"mismatches": mismatches[:10]})
    return _row_finite_verdict(c, "e^(n)_mk equals e_nk for every m past the row support")


def _mt24(c: _Ctx) -> Verdict:
    return _row_finite_verdict(c, "each row of E has finitely many nonzero entries")


def _mt25(c: _Ctx) -> Verdict:
    return _row_finite_verdict(c, "alpha_k = e_nk, reached once m passes the row support")


def _per_row_sup(c: _Ctx, n: int, M: int, L: int | None) -> object:
    """max over m <= support of sum_k |e^(n)_mk| M^(-1/p_k) (L^(1/q_n))."""
    ctx = context(c.precision)
    s = c.E.support(n)
    if s < 0:
        return ctx.zero
    colw = column_weights(c.p, M, -1, s + 1, c.precision)
    best = ctx.zero
    for m in range(s + 1):
        if m not in c.A.row(n) and m != s:
            continue
        row = c.E.truncated_row(n, m)
        best = max(best, sum((abs(to_mpf(v, c.precision)) * colw[k] for k, v in enumerate(row) if v),
                             ctx.zero))
    if L is not None:
        best *= real_pow(L, 1 / c.q(n), c.precision)
    return best


def _per_row_limit(c: _Ctx) -> int:
    return min(c.N, 32)


def _mt26(c: _Ctx) -> Verdict:
    M = c.cfg.grid()[0]
    vals = {n: _per_row_sup(c, n, M, None) for n in range(_per_row_limit(c) + 1)}
    return _row_finite_verdict(c, "the supremum over m is a maximum over m up to the row support",
                               {"witness_M": M, "row_maxima": vals})


def _mt27(c: _Ctx) -> Verdict:
    M = c.cfg.grid()[0]
    L = c.cfg.grid()[-1]
    vals = {n: _per_row_sup(c, n, M, L) for n in range(_per_row_limit(c) + 1)}
    return _row_finite_verdict(c, "for each L the supremum over m is a finite maximum",
                               {"witness_M": M, "largest_L": L, "row_maxima": vals})


def _mt28(c: _Ctx) -> Verdict:
    sums = {n: sum(c.E.row(n), Fraction(0)) for n in range(_per_row_limit(c) + 1)}
    return _row_finite_verdict(c, "row sums of E^(n) are constant past the row support",
                               {"row_sum_limits": sums})


def _forall_L(c: _Ctx, per_L: Callable[[int], Verdict]) -> Verdict:
    return forall_on_grid("L", per_L, c.cfg, c.N)


def _row_sums_weighted(c: _Ctx, base: int, sign: int, shift=None, rowf=None) -> list:
    W = c.window()
    colw = column_weights(c.p, base, sign, W.ncols, c.precision)
    return weighted_row_sums(W, colw, rowf=rowf, shift=shift)


def _mt29(c: _Ctx) -> Verdict:
    return _forall_L(c, lambda L: _verdict(
        bounded_sup(_row_sums_weighted(c, L, +1), c.cfg, c.precision), c.N))


def _alpha(c: _Ctx):
    return column_limits(c.window(), c.cfg, c.precision)


def _mt30(c: _Ctx) -> Verdict:
    return _alpha(c).verdict(c.N)


def _mt31(c: _Ctx) -> Verdict:
    v = _forall_L(c, lambda L: _verdict(
        converges(_row_sums_weighted(c, L, +1), c.cfg, c.precision), c.N))
    v.evidence["reading"] = "existence of a finite limit, not mere boundedness"
    return v


def _mt32(c: _Ctx) -> Verdict:
    return _forall_L(c, lambda L: _verdict(
        tends_to_zero(_row_sums_weighted(c, L, +1), c.cfg, c.precision), c.N))


def _q_power(c: _Ctx, values: list) -> list:
    return [real_pow(v, c.q(n), c.precision) for n, v in enumerate(values)]


def _mt33(c: _Ctx) -> Verdict:
    # nonnegative summands: the full row is the best finite set
    def at(M):
        vals = _q_power(c, _row_sums_weighted(c, M, -1))
        return _verdict(bounded_sup(vals, c.cfg, c.precision), c.N)

    return exists_on_grid("M", at, c.cfg, c.N)


def _column_null(c: _Ctx, shift=None) -> Verdict:
    W = c.window()
    statuses, per = [], {}
    for k in range(min(W.N // 2 + 1, W.ncols)):
        if shift is None:
            col = [pow_abs(W.exact[n][k], c.q(n), c.precision) for n in range(W.nrows)]
        else:
            col = [real_pow(abs(W.mp[n][k] - shift[k]), c.q(n), c.precision) for n in range(W.nrows)]
        a = tends_to_zero(col, c.cfg, c.precision)
        statuses.append(a.status)
        if not a.holds:
            per[k] = {"status": a.status.value, **a.evidence}
    return Verdict(combine_status(statuses), c.N, {},
                   {"columns_checked": len(statuses), "column_status": per})


def _mt34(c: _Ctx) -> Verdict:
    return _column_null(c)


def _row_factor(c: _Ctx, L: int, count: int) -> list:
    return [real_pow(L, 1 / c.q(n), c.precision) for n in range(count)]


def _forall_L_exists_M(c: _Ctx, shift=None) -> Verdict:
    W = c.window()
    sums: dict[int, list] = {}

    def per_L(L):
        rowf = _row_factor(c, L, W.nrows)

        def at(M):
            if M not in sums:
                sums[M] = _row_sums_weighted(c, M, -1, shift=shift)
            vals = [v * f for v, f in zip(sums[M], rowf)]
            return _verdict(bounded_sup(vals, c.cfg, c.precision), c.N)

        return exists_on_grid("M", at, c.cfg, c.N)

    return _forall_L(c, per_L)


def _mt35(c: _Ctx) -> Verdict:
    return _forall_L_exists_M(c)


def _mt36(c: _Ctx) -> Verdict:
    cl = _alpha(c)
    if cl.status is not Status.HOLDS:
        return cl.verdict(c.N)
    v = _column_null(c, shift=cl.alphas)
    v.evidence["limits"] = {k: a for k, a in enumerate(cl.alphas) if k < cl.checked}
    return v


def _mt37(c: _Ctx) -> Verdict:
    def at(M):
        return _verdict(bounded_sup(_row_sums_weighted(c, M, -1), c.cfg, c.precision), c.N)

    return exists_on_grid("M", at, c.cfg, c.N)


def _mt38(c: _Ctx) -> Verdict:
    cl = _alpha(c)
    if early := unestablished_limits(cl, c.N):
        return early
    v = _forall_L_exists_M(c, shift=cl.alphas)
    v.evidence["limits"] = {k: a for k, a in enumerate(cl.alphas) if k < cl.checked}
    return v


def _row_totals(c: _Ctx) -> list:
    return [to_mpf(s, c.precision) for s in c.window().row_sums()]


def _mt39(c: _Ctx) -> Verdict:
    vals = _q_power(c, [abs(t) for t in _row_totals(c)])
    return _verdict(bounded_sup(vals, c.cfg, c.precision), c.N)


def _mt40(c: _Ctx) -> Verdict:
    vals = _q_power(c, [abs(t) for t in _row_totals(c)])
    return _verdict(tends_to_zero(vals, c.cfg, c.precision), c.N)


def _mt41(c: _Ctx) -> Verdict:
    totals = _row_totals(c)
    conv = converges(totals, c.cfg, c.precision)
    if not conv.holds:
        return _verdict(conv, c.N)
    alpha = conv.evidence["limit_candidate"]
    vals = _q_power(c, [abs(t - alpha) for t in totals])
    return _verdict(tends_to_zero(vals, c.cfg, c.precision), c.N, limit=alpha)


_MT = {
    "mt23": _mt23, "mt24": _mt24, "mt25": _mt25, "mt26": _mt26, "mt27": _mt27, "mt28": _mt28,
    "mt29": _mt29, "mt30": _mt30, "mt31": _mt31, "mt32": _mt32, "mt33": _mt33, "mt34": _mt34,
    "mt35": _mt35, "mt36": _mt36, "mt37": _mt37, "mt38": _mt38, "mt39": _mt39, "mt40": _mt40,
    "mt41": _mt41,
}


def _a_window(A: Matrix, N: int, precision: int) -> Window:
    rows = []
    for n in range(N + 1):
        r = A.row(n)
        rows.append([r.get(k, Fraction(0)) for k in range(N + 1)])
    return Window(rows, precision)


_LEMMAS = {
    "L2.3": lemma_c0_to_l1,
    "L2.4": lemma_c0_to_c,
    "L2.5": lemma_c0_to_linf,
    "L2.6i": lemma_l_to_l1_high,
    "L2.6ii": lemma_l_to_l1_low,
    "L2.7i": lemma_l_to_linf_high,
    "L2.7ii": lemma_l_to_linf_low,
    "L2.8": lemma_l_to_c,
}


def _check_q(q: ExponentSeq):
    if not q.is_nondecreasing():
        raise SchemaError("q must be nondecreasing and bounded (a constant tail at least "
                          "as large as every prefix value)")


def condition_check(cid: str, A: Matrix, p: ExponentSeq, q: ExponentSeq | None = None,
                    cfg: WitnessSearchConfig | None = None, precision: int = DEFAULT_PRECISION,
                    E: EMatrices | None = None) -> Verdict:
    """Truncated verdict for one named condition.

    mt23..mt41 are conditions on E built from A; the lemma ids apply the base
    conditions (target exponent 1) to A itself.
    """
    cfg = cfg or WitnessSearchConfig()
    q = q or ExponentSeq.constant(1)
    _check_q(q)
    _require_row_finite(A)
    key = normalize_condition_id(cid)
    if key in _LEMMAS:
        v = _LEMMAS[key](_a_window(A, cfg.truncation, precision), p, cfg, precision)
    else:
        c = _Ctx(E or build_e_matrices(A, cfg.truncation), A, p, q, cfg, precision)
        v = _MT[key](c)
    v.evidence.setdefault("condition", key)
    return v


SOURCES = ("linf", "c0", "c")

_MAPPING_CONDITIONS = {
    ("linf", "linf"): ("mt23", "mt24", "mt29"),
    ("linf", "c"): ("mt23", "mt24", "mt30", "mt31"),
    ("linf", "c0"): ("mt23", "mt24", "mt32"),
    ("c0", "linf"): ("mt25", "mt26", "mt27", "mt33"),
    ("c0", "c0"): ("mt25", "mt26", "mt27", "mt34", "mt35"),
    ("c0", "c"): ("mt25", "mt26", "mt27", "mt36", "mt37", "mt38"),
    ("c", "linf"): ("mt25", "mt26", "mt27", "mt28", "mt33", "mt39"),
    ("c", "c0"): ("mt25", "mt26", "mt27", "mt28", "mt34", "mt35", "mt40"),
    ("c", "c"): ("mt25", "mt26", "mt27", "mt28", "mt36", "mt37", "mt38", "mt41"),
}


def _parse_target(target: str) -> tuple[str, bool]:
    """Family and whether the target carries the exponent sequence q."""
    t = target.strip().lower().replace(" ", "")
    with_q = t.endswith("(q)") or t.endswith("_q")
    base = t[:-3] if t.endswith("(q)") else t[:-2] if t.endswith("_q") else t
    fam = {"c0": "c0", "c_0": "c0", "c": "c", "linf": "linf", "l_inf": "linf",
           "ℓ∞": "linf", "l∞": "linf"}.get(base)
    if fam is None:
        raise UnsupportedPairError(f"unsupported target space {target!r}")
    return fam, with_q


def mapping_conditions(source: SpaceId | str, target: str) -> tuple[str, ...]:
    if isinstance(source, str):
        try:
            source = SpaceId.parse(source)
        except ValueError:
            raise UnsupportedPairError(f"unsupported source space {source!r}") from None
    if source.layer != FIBONACCI or source.family not in SOURCES:
        raise UnsupportedPairError(f"no characterization for maps out of {source}")
    fam, with_q = _parse_target(target)
    if source.family == "linf" and with_q:
        raise UnsupportedPairError(f"no characterization for maps from {source} into {target}")
    return _MAPPING_CONDITIONS[(source.family, fam)]


def classify_mapping(A: Matrix, source: SpaceId | str, target: str, p: ExponentSeq,
                     q: ExponentSeq | None = None, cfg: WitnessSearchConfig | None = None,
                     precision: int = DEFAULT_PRECISION, inverse: Matrix | None = None) -> Verdict:
    """Is A a map from `source` into `target`? Conjunction of the characterizing conditions.

    Targets without (q) are read with q_n = 1.
    """
    cfg = cfg or WitnessSearchConfig()
    ids = mapping_conditions(source, target)
    q = q or ExponentSeq.constant(1)
    _require_row_finite(A)
    E = build_e_matrices(A, cfg.truncation, inverse)
    parts = {cid: condition_check(cid, A, p, q, cfg, precision, E=E) for cid in ids}
    identity = E.is_identity(cfg.truncation)
    return _combine(parts, cfg.truncation, source=str(source), target=target,
                    conditions=list(ids), matrix=A.describe(), e_is_identity=identity)
