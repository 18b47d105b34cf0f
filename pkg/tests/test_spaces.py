from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibseq import (ExponentSeq, Seq, SpaceId, Status, classify, g_paranorm, gstar_paranorm, h1,
                    h2, inverse_apply)
from fibseq.numeric import pow_abs, ulp
from fibseq.spaces import absolute_property_witness

from conftest import constant_exponents, exponent_seqs, finite_seqs, seqs_with_tails

P1 = ExponentSeq.constant(1)
P2 = ExponentSeq.constant(2)
PREC = 128


def mp128():
    mp = mpmath.mp.clone()
    mp.prec = PREC
    return mp


def test_h1_examples():
    y = Seq.finite([1, -2])
    assert h1(y, P1, 8) == 2
    assert h1(Seq.finite([]), P1, 8) == 0
    assert h1(y, P2, 8) == 2


def test_h2_examples():
    assert h2(Seq.finite([1, -2]), P1, 8) == 3
    assert h2(Seq.finite([]), P1, 8) == 0
    assert h2(Seq.geometric(1, Fraction(1, 2)), P1, 8) == 2


def test_g_examples():
    assert g_paranorm(Seq.finite([1]), P1, 8) == 2
    assert g_paranorm(Seq.finite([1, -1]), P1, 8) == Fraction(5, 2)
    assert g_paranorm(Seq.finite([]), P1, 8) == 0


def test_gstar_examples():
    assert gstar_paranorm(Seq.finite([1]), P1, 8) == 3
    assert gstar_paranorm(Seq.finite([]), P1, 8) == 0
    assert gstar_paranorm(Seq.finite([1]), P2, 8) == mp128().sqrt(5)


def test_classify_examples():
    assert classify(Seq.finite([1]), "c0(F,p)", P1, 32).verdict.status is Status.HOLDS
    v_e0 = Seq.finite(inverse_apply(Seq.finite([1]), 40))
    # V e0 cut at 40 is not V e0; the transform gains one nonzero entry at 41
    assert classify(v_e0, "c0(F,p)", P1, 32).verdict.status is Status.HOLDS
    rep = classify(Seq.constant(1), "c(F,p)", P1, 64)
    assert rep.verdict.status is Status.HOLDS
    assert abs(rep.limit_candidate - (1 / mpmath.phi - mpmath.phi)) < 1e-12
    assert abs(rep.limit_candidate + 1) < 1e-12


def test_classify_rejections():
    assert classify(Seq.constant(1), "c0(F,p)", P1, 32).verdict.status is Status.FAILS
    assert classify(Seq.constant(1), "c0(p)", P1, 32).verdict.status is Status.FAILS
    assert classify(Seq.constant(1), "l(p)", P1, 32).verdict.status is Status.FAILS
    assert classify(Seq.geometric(1, Fraction(1, 3)), "l(p)", P1, 32).verdict.status is Status.HOLDS


@pytest.mark.parametrize("text", ["c0(F,p)", "linf_fhat", "l(p)", "c(F,p)", "c0(p)"])
def test_space_ids_parse(text):
    assert SpaceId.parse(str(SpaceId.parse(text))) == SpaceId.parse(text)


def test_absolute_property_witness():
    x, gx, gabs = absolute_property_witness(P1)
    assert (gx, gabs) == (Fraction(5, 2), Fraction(3, 2))
    _, gneg, _ = absolute_property_witness(P1, x=x.scale(-1))
    assert gneg == gx
    _, gx2, gabs2 = absolute_property_witness(P2)
    assert gx2 != gabs2


@given(finite_seqs(max_len=10, bits=32), exponent_seqs())
def test_g_zero_and_symmetry(x, p):
    assert g_paranorm(Seq.finite([]), p, 16) == 0
    assert g_paranorm(x, p, 16) == g_paranorm(x.scale(-1), p, 16)


@given(st.fractions(min_value=Fraction(-50), max_value=Fraction(50), max_denominator=100),
       st.fractions(min_value=Fraction(1, 10), max_value=Fraction(4), max_denominator=30))
def test_maddox_pointwise_bound(alpha, pk):
    M = max(Fraction(1), pk)
    lhs = pow_abs(alpha, pk, PREC)
    rhs = max(mp128().mpf(1), pow_abs(alpha, M, PREC))
    assert lhs <= rhs + 2 * ulp(rhs, PREC)


@given(seqs_with_tails(), exponent_seqs(), st.integers(1, 30))
def test_truncated_sums_monotone_in_n(y, p, N):
    assert h1(y, p, N, include_tail=False) <= h1(y, p, N + 5, include_tail=False)
    assert h2(y, p, N, include_tail=False) <= h2(y, p, N + 5, include_tail=False)


@given(finite_seqs(max_len=12, bits=32), constant_exponents())
def test_paranorm_preservation(y, p):
    assert g_paranorm(inverse_apply(y, 20), p, 20) == h1(y, p, 20)
