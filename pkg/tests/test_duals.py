import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibseq import (DualSetId, ExponentRangeError, ExponentSeq, SchemaError, Seq, Status, TailSpec,
                    WitnessSearchConfig, c_matrix_entry, d_matrix_entry, dual_membership,
                    dual_set_check, inverse_apply)
from fibseq.duals import c_window, d_window, dual_sets
from fibseq.numeric import to_mpf

from conftest import constant_exponents

E0 = Seq.finite([1])
ONES = Seq.constant(1)
P1 = ExponentSeq.constant(1)
SMALL = WitnessSearchConfig(truncation=40)


def finitely_supported(max_len: int = 8):
    entries = st.fractions(min_value=-20, max_value=20, max_denominator=12)
    return st.lists(entries, min_size=1, max_size=max_len).map(Seq.finite)


def test_c_entries():
    assert c_matrix_entry(E0, 0, 0) == 1
    assert c_matrix_entry(E0, 3, 1) == 0
    assert c_matrix_entry(ONES, 2, 1) == Fraction(9, 2)
    assert c_matrix_entry(ONES, 1, 2) == 0


def test_d_entries():
    assert d_matrix_entry(E0, 5, 0) == 1
    assert d_matrix_entry(E0, 5, 2) == 0
    assert d_matrix_entry(ONES, 1, 0) == 5


def test_entries_reject_negative_indices():
    with pytest.raises(ValueError):
        d_matrix_entry(E0, 1, -1)


@given(finitely_supported(), st.integers(0, 12))
def test_d_columns_are_partial_sums_of_a_times_basis(a, k):
    # second route: column k of D is the partial-sum sequence of a_j (V e_k)_j
    x = inverse_apply(Seq.unit(k), 20)
    partial = list(itertools.accumulate(a.eval(j) * x[j] for j in range(21)))
    assert [d_matrix_entry(a, n, k) for n in range(21)] == partial
    assert [c_matrix_entry(a, n, k) for n in range(21)] == [a.eval(j) * x[j] for j in range(21)]


def test_windows_match_entries():
    a = Seq(tuple(map(Fraction, [2, -1, 3])), TailSpec.geometric(1, Fraction(1, 2)))
    C, D = c_window(a, 12), d_window(a, 12)
    for n in range(13):
        for k in range(n + 1):
            assert C.exact[n][k] == c_matrix_entry(a, n, k)
            assert D.exact[n][k] == d_matrix_entry(a, n, k)


@pytest.mark.parametrize("text, index", [("F3", 3), ("3", 3), ("f16", 16), (7, 7)])
def test_dual_set_ids(text, index):
    assert DualSetId.parse(text).index == index


@pytest.mark.parametrize("text", ["F0", "F17", "x"])
def test_bad_dual_set_ids(text):
    with pytest.raises(SchemaError):
        DualSetId.parse(text)


def test_examples():
    assert dual_set_check(2, E0, P1, SMALL).status is Status.HOLDS
    assert dual_set_check(4, E0, P1, SMALL).status is Status.HOLDS
    v = dual_set_check(2, ONES, P1)
    assert v.status is Status.FAILS
    assert v.evidence["method"] == "monotone_divergence"


@pytest.mark.parametrize("space, kind", [
    ("c0(F,p)", "alpha"), ("c0(F,p)", "beta"), ("c0(F,p)", "gamma"), ("c(F,p)", "gamma")])
def test_e0_in_duals(space, kind):
    assert dual_membership(space, kind, E0, P1, SMALL).status is Status.HOLDS


def test_routing():
    half, two = ExponentSeq.constant(Fraction(1, 2)), ExponentSeq.constant(2)
    assert dual_sets("l(F,p)", "alpha", half) == (12,)
    assert dual_sets("l(F,p)", "alpha", two) == (13,)
    assert dual_sets("l(F,p)", "beta", two) == (14, 15, 16)
    assert dual_sets("c(F,p)", "beta", P1) == (3, 4, 5, 6)
    mixed = ExponentSeq.of([Fraction(1, 2)], TailSpec.constant(2))
    with pytest.raises(ExponentRangeError):
        dual_membership("l(F,p)", "alpha", E0, mixed)
    with pytest.raises(SchemaError):
        dual_sets("c0(p)", "alpha", P1)
    with pytest.raises(SchemaError):
        dual_sets("c0(F,p)", "delta", P1)


def test_low_range_beta_records_skipped_set():
    v = dual_membership("l(F,p)", "beta", E0, ExponentSeq.constant(Fraction(1, 2)), SMALL)
    assert "F14" in v.evidence["skipped"]


@settings(max_examples=50)
@given(finitely_supported(), constant_exponents())
def test_finite_support_holds(a, p):
    for i in (2, 4, 7, 15, 16):
        assert dual_set_check(i, a, p, SMALL).status is Status.HOLDS, f"F{i}"


@settings(max_examples=25)
@given(finitely_supported(),
       st.lists(st.tuples(st.fractions(min_value=-1, max_value=1, max_denominator=16),
                          st.sampled_from([Fraction(1, 2), Fraction(-1, 2), Fraction(2, 3),
                                           Fraction(-3, 4), Fraction(1, 5)])),
                min_size=1, max_size=3))
def test_gamma_dual_of_c0_agrees_with_direct_partial_sums(a, geometric_parts):
    N = SMALL.truncation
    verdict = dual_set_check(3, a, P1, SMALL)
    # y is a decaying element of c0(p); x = V y then lies in c0(F,p)
    y = [sum((c * r**k for c, r in geometric_parts), Fraction(0)) for k in range(N + 1)]
    x = inverse_apply(y, N)
    direct = list(itertools.accumulate(a.eval(k) * x[k] for k in range(N + 1)))
    D = d_window(a, N)
    via_d = [sum((D.exact[n][k] * y[k] for k in range(n + 1)), Fraction(0)) for n in range(N + 1)]
    assert direct == via_d
    # finitely supported a: partial sums freeze after the support
    support = len(a.prefix)
    assert all(s == direct[support] for s in direct[support:])
    if verdict.status is Status.HOLDS:
        B = verdict.witnesses["B"]
        bound = verdict.evidence["at_witness"]["evidence"]["sup_at_truncation"]
        scale = max(abs(v) for v in y) * B or 1
        assert all(to_mpf(abs(s) / scale) <= bound * (1 + 1e-30) for s in direct)


@pytest.mark.parametrize("a", [ONES, Seq.constant(-3), Seq.geometric(1, Fraction(9, 10))])
def test_series_failures_carry_monotone_checkpoints(a):
    v = dual_set_check(2, a, P1)
    assert v.status is Status.FAILS
    cps = list(v.evidence["checkpoints"].values())
    assert len(cps) >= 3 and all(x < y for x, y in zip(cps, cps[1:]))


def test_verdicts_are_deterministic():
    a = Seq(tuple(map(Fraction, [1, -1, 2])), TailSpec.geometric(1, Fraction(1, 3)))
    for i in (1, 3, 5, 9, 12):
        assert dual_set_check(i, a, P1, SMALL).to_dict() == dual_set_check(i, a, P1, SMALL).to_dict()


@pytest.mark.parametrize("i", [5, 10])
@pytest.mark.parametrize("a", [ONES, Seq.geometric(1, Fraction(1, 2))])
def test_shift_by_unverified_limits_never_holds(i, a):
    # the columns of D diverge; below the blow-up threshold that is not yet certified
    assert dual_set_check(i, a, ExponentSeq.constant(2), WitnessSearchConfig(truncation=32)).status is Status.INCONCLUSIVE


def test_divergent_column_fails_at_default_truncation():
    for i in (5, 10):
        v = dual_set_check(i, ONES, P1)
        assert v.status is Status.FAILS and v.evidence["reason"] == "column diverges"


@pytest.mark.parametrize("p, refused", [(ExponentSeq.constant(Fraction(1, 2)), {13, 14}),
                                        (ExponentSeq.constant(2), {12})])
def test_every_set_runs_on_e0(p, refused):
    for i in range(1, 17):
        if i in refused:
            with pytest.raises(ExponentRangeError):
                dual_set_check(i, E0, p, SMALL)
            continue
        v = dual_set_check(i, E0, p, SMALL)
        # the B^(+1/p) sets and F12/F13 grow linearly for e0, as written
        expected = Status.INCONCLUSIVE if i in (8, 12, 13) else Status.HOLDS
        assert v.status is expected, f"F{i}"
