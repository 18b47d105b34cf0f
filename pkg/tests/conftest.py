import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fibseq import ExponentSeq, Seq

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


def rationals(bits: int = 64, nonzero: bool = False):
    lim = 2**bits - 1
    num = st.integers(-lim, lim)
    if nonzero:
        num = num.filter(bool)
    return st.builds(Fraction, num, st.integers(1, lim))


def finite_seqs(max_len: int = 16, bits: int = 64):
    return st.lists(rationals(bits), max_size=max_len).map(Seq.finite)


@st.composite
def seqs_with_tails(draw, max_len: int = 8, bits: int = 32):
    prefix = draw(st.lists(rationals(bits), max_size=max_len))
    kind = draw(st.sampled_from(["zero", "constant", "geometric"]))
    if kind == "zero":
        return Seq.finite(prefix)
    c = draw(rationals(16))
    if kind == "constant":
        return Seq(tuple(prefix), Seq.constant(c).tail)
    r = draw(st.fractions(min_value=Fraction(-9, 10), max_value=Fraction(9, 10), max_denominator=50))
    return Seq(tuple(prefix), Seq.geometric(c, r).tail)


def constant_exponents(low=Fraction(1, 10), high=Fraction(3)):
    return st.fractions(min_value=low, max_value=high, max_denominator=20).filter(
        lambda v: v > 0).map(ExponentSeq.constant)


@st.composite
def exponent_seqs(draw):
    prefix = draw(st.lists(st.fractions(min_value=Fraction(1, 4), max_value=Fraction(3),
                                        max_denominator=12), max_size=5))
    tail = draw(st.fractions(min_value=Fraction(1, 4), max_value=Fraction(3), max_denominator=12))
    return ExponentSeq(Seq(tuple(prefix), Seq.constant(tail).tail))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        ok, title = mod.RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}")
