from fractions import Fraction

import mpmath
import pytest

from fibseq import (cassini_residual, cassini_substituted, fib, fib_prefix_sum,
                    golden_ratio_error, reciprocal_fib_partial_sum)


def matrix_power_fib(n: int) -> int:
    # [[1,1],[1,0]]^(n+1) has f_n (shifted convention) in the top-left corner
    def mul(a, b):
        return [[a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]]]
    result, base, e = [[1, 0], [0, 1]], [[1, 1], [1, 0]], n
    while e:
        if e & 1:
            result = mul(result, base)
        base = mul(base, base)
        e >>= 1
    return result[0][0]


@pytest.mark.parametrize("n, expected", [(0, 1), (1, 1), (6, 13)])
def test_fib_examples(n, expected):
    assert fib(n) == expected


def test_fib_agrees_with_matrix_powers():
    for n in list(range(200)) + [500, 999, 1000]:
        assert fib(n) == matrix_power_fib(n)


def test_fib_rejects_negative():
    with pytest.raises(ValueError):
        fib(-1)


@pytest.mark.parametrize("n, expected", [(1, 1), (2, -1), (3, 1)])
def test_cassini_examples(n, expected):
    assert cassini_residual(n) == expected


def test_cassini_forms_up_to_1000():
    for n in range(1, 1001):
        assert cassini_residual(n) == (-1) ** (n + 1)
        assert cassini_substituted(n) == (-1) ** (n + 1)


@pytest.mark.parametrize("n, expected", [(0, 1), (5, 20), (9, 143)])
def test_prefix_sum_examples(n, expected):
    assert fib_prefix_sum(n) == expected


def test_prefix_sum_identity():
    for n in range(1001):
        assert fib_prefix_sum(n) == fib(n + 2) - 1


def test_golden_ratio_examples():
    mp = mpmath.mp.clone()
    mp.prec = 200
    assert abs(golden_ratio_error(1) - (2 - mp.phi)) < 1e-30
    assert abs(golden_ratio_error(9) - abs(mp.mpf(89) / 55 - mp.phi)) < 1e-30
    assert float(golden_ratio_error(9)) == pytest.approx(1.46e-4, rel=2e-2)
    assert golden_ratio_error(40) < 1e-16


def test_golden_ratio_strictly_decreasing():
    errs = [golden_ratio_error(n) for n in range(2, 81)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_reciprocal_sum():
    assert reciprocal_fib_partial_sum(0) == 1
    assert reciprocal_fib_partial_sum(2) == mpmath.mpf(5) / 2
    mp = mpmath.mp.clone()
    mp.prec = 256
    exact = sum(Fraction(1, fib(k)) for k in range(31))
    assert abs(reciprocal_fib_partial_sum(30) - mp.mpf(exact.numerator) / exact.denominator) < 1e-35
    assert reciprocal_fib_partial_sum(60) - reciprocal_fib_partial_sum(50) < 1e-9
