import random
from fractions import Fraction

import pytest

from fibseq import (BUILTINS, ExplicitMatrix, ExponentSeq, SchemaError, Status,
                    UnsupportedMatrixError, UnsupportedPairError, WitnessSearchConfig,
                    build_e_matrices, classify_mapping, condition_check, fib, identity_check,
                    inverse_apply, parse_matrix)
from fibseq.matmaps import mapping_conditions, normalize_condition_id
from fibseq.numeric import to_mpf
from fibseq.transform import fhat_entry, inverse_entry

FHAT, IDENTITY, ZERO = BUILTINS["fhat"], BUILTINS["identity"], BUILTINS["zero"]
P1 = ExponentSeq.constant(1)
CFG = WitnessSearchConfig(truncation=64)


def random_banded(rng: random.Random, rows: int, width: int) -> list[dict[int, Fraction]]:
    return [{k: Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for k in range(max(0, n - width), n + 1)}
            for n in range(rows)]


def times_fhat(B: list[dict[int, Fraction]]) -> ExplicitMatrix:
    """A = B F, so that E = A V = B exactly."""
    rows = []
    for b in B:
        r: dict[int, Fraction] = {}
        for j, v in b.items():
            for k in (j - 1, j):
                if k >= 0:
                    r[k] = r.get(k, Fraction(0)) + v * fhat_entry(j, k)
        rows.append(r)
    return ExplicitMatrix(rows)


def dense_e(A, n: int, k: int) -> Fraction:
    return sum((v * inverse_entry(j, k) for j, v in A.row(n).items() if j >= k), Fraction(0))


def test_e_for_fhat_is_identity():
    E = build_e_matrices(FHAT, 64)
    assert E.is_identity(64)
    assert identity_check(64)


def test_e_for_identity_is_inverse():
    E = build_e_matrices(IDENTITY, 20)
    for n in range(21):
        for k in range(n + 1):
            assert E.e(n, k) == Fraction(fib(n + 1) ** 2, fib(k) * fib(k + 1))


def test_e_for_zero():
    E = build_e_matrices(ZERO, 10)
    assert all(E.e(n, k) == 0 for n in range(11) for k in range(11))


def test_e_against_direct_products_and_stabilization():
    rng = random.Random(7)
    rows = [{k: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for k in rng.sample(range(n + 4), 3)}
            for n in range(65)]
    A = ExplicitMatrix(rows)
    E = build_e_matrices(A, 64)
    for n in range(65):
        s = E.support(n)
        for k in range(65):
            assert E.e(n, k) == dense_e(A, n, k)
        for m in (s, s + 1, s + 5):
            assert E.truncated_row(n, m)[: s + 1] == E.row(n)


def test_e_with_custom_inverse_matches_default():
    A = ExplicitMatrix([{0: 1, 1: 2}, {1: -1, 2: 3}, {0: 5, 2: 1}])
    V = ExplicitMatrix([{k: inverse_entry(n, k) for k in range(n + 1)} for n in range(8)])
    E1, E2 = build_e_matrices(A, 2), build_e_matrices(A, 2, inverse=V)
    assert all(E1.e(n, k) == E2.e(n, k) for n in range(3) for k in range(4))


def test_times_fhat_gives_e_equal_b():
    B = random_banded(random.Random(3), 30, 3)
    E = build_e_matrices(times_fhat(B), 40)
    for n in range(41):
        for k in range(42):
            assert E.e(n, k) == (B[n].get(k, 0) if n < 30 else 0)


def test_condition_examples():
    v = condition_check("mt30", FHAT, P1, cfg=CFG)
    assert v.status is Status.HOLDS
    assert all(a == 0 for a in v.evidence["limits"].values())
    q = ExponentSeq.of([Fraction(1, 2)], ExponentSeq.constant(2).seq.tail)
    assert condition_check("mt34", FHAT, P1, q, cfg=CFG).status is Status.HOLDS
    v = condition_check("mt39", FHAT, P1, cfg=CFG)
    assert v.status is Status.HOLDS
    assert v.evidence["sup_at_truncation"] == 1


@pytest.mark.parametrize("alias, key", [("3.10", "mt30"), ("(3.3)", "mt23"), ("mt41", "mt41"), ("L2.6i", "L2.6i")])
def test_condition_aliases(alias, key):
    assert normalize_condition_id(alias) == key


@pytest.mark.parametrize("bad", ["3.22", "mt42", "L2.9", "x"])
def test_unknown_conditions(bad):
    with pytest.raises(SchemaError):
        normalize_condition_id(bad)


def test_q_must_be_nondecreasing():
    q = ExponentSeq.of([Fraction(3)], ExponentSeq.constant(1).seq.tail)
    with pytest.raises(SchemaError):
        condition_check("mt34", FHAT, P1, q, cfg=CFG)


def test_mapping_examples():
    v = classify_mapping(FHAT, "c0(F,p)", "c0(q)", P1, P1, cfg=CFG)
    assert v.status is Status.HOLDS and v.evidence["e_is_identity"]
    for src in ("linf(F,p)", "c0(F,p)", "c(F,p)"):
        for tgt in ("linf", "c", "c0"):
            assert classify_mapping(ZERO, src, tgt, P1, cfg=CFG).status is Status.HOLDS
    with pytest.raises(UnsupportedPairError):
        classify_mapping(FHAT, "l(F,p)", "linf", P1)
    with pytest.raises(UnsupportedPairError):
        mapping_conditions("linf(F,p)", "c0(q)")
    with pytest.raises(UnsupportedMatrixError):
        classify_mapping(BUILTINS["ones"], "c0(F,p)", "linf", P1)


def test_fhat_rejections():
    assert classify_mapping(FHAT, "linf(F,p)", "c0", P1, cfg=CFG).status is Status.FAILS
    # E = V grows like phi^(2n); the blow-up threshold is crossed only at the default truncation
    assert classify_mapping(IDENTITY, "c0(F,p)", "linf", P1, cfg=CFG).status is Status.INCONCLUSIVE
    assert classify_mapping(IDENTITY, "c0(F,p)", "linf", P1).status is Status.FAILS


def test_parse_matrix():
    A = parse_matrix({"kind": "banded", "rows": [[{"k": 0, "v": "1/2"}], [{"k": 0, "v": "1"}, {"k": 1, "v": "-3"}]]})
    assert A.entry(1, 1) == -3 and A.entry(0, 0) == Fraction(1, 2) and A.entry(5, 2) == 0
    assert parse_matrix({"kind": "builtin", "name": "fhat"}) is FHAT
    for bad in ({"kind": "dense"}, {"kind": "builtin", "name": "v"}, {"kind": "banded", "rows": [[{"k": -1, "v": "1"}]]},
                {"kind": "banded", "rows": [[{"k": 0, "v": "1"}, {"k": 0, "v": "2"}]]}, {"rows": []}):
        with pytest.raises(SchemaError):
            parse_matrix(bad)


def test_verdicts_are_deterministic():
    A = times_fhat(random_banded(random.Random(11), 20, 2))
    first = classify_mapping(A, "c(F,p)", "c", P1, cfg=CFG).to_dict()
    assert classify_mapping(A, "c(F,p)", "c", P1, cfg=CFG).to_dict() == first


def test_bounded_maps_respect_predicted_constant():
    rng = random.Random(2024)
    N = 64
    for trial in range(20):
        B = random_banded(rng, rng.randint(20, 48), rng.randint(0, 4))
        A = times_fhat(B)
        v = classify_mapping(A, "c0(F,p)", "linf", P1, cfg=CFG)
        assert v.status is Status.HOLDS, trial
        mt33 = v.evidence["components"]["mt33"]
        M = mt33["witnesses"]["M"]
        bound = mt33["evidence"]["at_witness"]["evidence"]["sup_at_truncation"]
        width = max(max(r, default=0) for r in A.rows) + 1
        for _ in range(20):
            c, r = Fraction(rng.randint(-9, 9), 7), Fraction(rng.randint(-8, 8), 9)
            y = [c * r**k + Fraction(rng.randint(-3, 3), (k + 2) ** 2) for k in range(width + 1)]
            scale = max(abs(t) for t in y) * M or 1
            x = inverse_apply([t / scale for t in y], width)
            for n in range(N + 1):
                ax = sum((a * x[j] for j, a in A.row(n).items()), Fraction(0))
                assert to_mpf(abs(ax)) <= bound * (1 + 1e-30)


@pytest.mark.parametrize("p, refused", [(ExponentSeq.constant(Fraction(1, 2)), {"L2.6i", "L2.7i"}),
                                        (ExponentSeq.constant(2), {"L2.6ii", "L2.7ii"})])
def test_lemma_conditions(p, refused):
    from fibseq import ExponentRangeError
    from fibseq.matmaps import LEMMA_IDS
    for cid in LEMMA_IDS:
        if cid in refused:
            with pytest.raises(ExponentRangeError):
                condition_check(cid, ZERO, p, cfg=CFG)
            continue
        assert condition_check(cid, ZERO, p, cfg=CFG).status is Status.HOLDS, cid
    # F itself is bounded on c0(p) but its row sums of |a_nk| do not shrink
    assert condition_check("L2.5", FHAT, p, cfg=CFG).status is Status.HOLDS
    assert condition_check("L2.3", FHAT, p, cfg=CFG).status is not Status.HOLDS


def test_shift_by_unverified_limits_never_holds():
    small = WitnessSearchConfig(truncation=32)
    assert condition_check("mt38", IDENTITY, P1, cfg=small).status is Status.INCONCLUSIVE
    assert condition_check("mt38", IDENTITY, P1).status is Status.FAILS


def test_every_condition_on_delta_and_zero_matrices():
    from fibseq.matmaps import MT_IDS
    small = WitnessSearchConfig(truncation=32)
    for cid in MT_IDS:
        assert condition_check(cid, ZERO, P1, cfg=small).status is Status.HOLDS, cid
        # E = I: row sums of |e_nk| L^(1/p) equal L and row totals equal 1, neither tends to zero
        expected = Status.FAILS if cid in ("mt32", "mt40") else Status.HOLDS
        assert condition_check(cid, FHAT, P1, cfg=small).status is expected, cid
