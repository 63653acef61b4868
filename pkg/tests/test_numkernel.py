from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from invpi2.numkernel import (
    QuadExt,
    Real,
    const_pi,
    const_zeta3,
    hurwitz_zeta3,
    quad_sqrt,
    quad_value,
    squarefree_decomposition,
    trig_at_rational,
)


def _direct_zeta3(s, D):
    # partial sum plus the Euler-Maclaurin tail, computed with mpmath
    ctx = mpmath.MPContext()
    ctx.dps = D + 10
    s = ctx.mpf(s.numerator) / s.denominator
    N = 2 * D
    head = ctx.fsum(1 / (n + s) ** 3 for n in range(N))
    x = N + s
    tail = 1 / (2 * x**2) + 1 / (2 * x**3)
    tail += ctx.fsum(ctx.bernoulli(2 * k) * (2 * k + 1) / 2 / x ** (2 * k + 2) for k in range(1, 25))
    return head + tail


def test_pi_30_digits():
    assert str(const_pi(30)).startswith("3.14159265358979323846264338328")


def test_pi_monotone_in_precision():
    assert const_pi(30).close_to(const_pi(20), 19)


def test_pi_sine_residual():
    v = const_pi(100)
    assert abs(v.ctx.sin(v.value)) < mpmath.mpf(10) ** -95


def test_zeta3_tabulated():
    assert str(const_zeta3(20)).startswith("1.2020569031595942854")


def test_zeta3_is_hurwitz_at_one():
    assert const_zeta3(50).close_to(hurwitz_zeta3(1, 50), 48)


def test_zeta3_against_direct_sum():
    assert const_zeta3(40).close_to(Real(_direct_zeta3(Fraction(1), 40), 40), 38)


@pytest.mark.parametrize("D", [30, 60, 120])
def test_hurwitz_half_is_seven_zeta3(D):
    ratio = hurwitz_zeta3(Fraction(1, 2), D) / const_zeta3(D)
    assert ratio.close_to(7, D - 5)


def test_hurwitz_thirds_sum():
    s = hurwitz_zeta3(Fraction(1, 3), 40) + hurwitz_zeta3(Fraction(2, 3), 40)
    assert s.close_to(26 * const_zeta3(40), 37)


@pytest.mark.parametrize("s", [Fraction(1, 5), Fraction(3, 8), Fraction(5, 6)])
def test_hurwitz_against_direct(s):
    assert hurwitz_zeta3(s, 40).close_to(Real(_direct_zeta3(s, 40), 40), 36)


def test_trig_values():
    assert abs(trig_at_rational("cot", Fraction(1, 2), 30).value) < mpmath.mpf(10) ** -28
    assert trig_at_rational("sin", Fraction(1, 2), 30).close_to(1, 28)
    assert trig_at_rational("cot", Fraction(1, 4), 30).close_to(1, 28)


def test_quad_value_examples():
    assert str(quad_value(QuadExt(0, 1, 5), 20)).startswith("2.2360679")
    assert str(quad_value(QuadExt(56, -25, 5), 20)).startswith("0.0983")
    assert quad_value(QuadExt(3, 0, 1), 20).close_to(3, 19)


def test_quadext_normalises_disc():
    x = QuadExt(0, 1, 20)
    assert (x.coef, x.disc) == (2, 5)
    assert QuadExt(1, 3, 4).is_rational and QuadExt(1, 3, 4).rat == 7


def test_quadext_arithmetic():
    r5 = QuadExt(0, 1, 5)
    assert r5 * r5 == 5
    x = (5 * r5 - 11) / 8
    assert x * (1 / x) == 1
    assert (x.conjugate() * x).is_rational


def test_quad_sqrt():
    assert quad_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert quad_sqrt(QuadExt(6, 2, 5)) == QuadExt(1, 1, 5)
    assert quad_sqrt(QuadExt(1, 1, 5)) is None
    assert quad_sqrt(5) == QuadExt(0, 1, 5)


@given(st.integers(1, 10**6))
def test_squarefree_decomposition(n):
    m, d = squarefree_decomposition(n)
    assert m * m * d == n
    assert all(d % (p * p) for p in range(2, 200))


fracs = st.fractions(max_denominator=10**6)


@given(fracs, fracs)
def test_rational_exact(a, c):
    assert (a + c) - c == a


@given(st.integers(20, 60), st.fractions(min_value=-10, max_value=10, max_denominator=1000))
def test_precision_consistency(D, x):
    lo = Real.from_value(x, D) * const_pi(D)
    hi = (Real.from_value(x, 2 * D) * const_pi(2 * D)).at(D)
    assert lo.close_to(hi, D - 3)


def test_real_rejects_nonpositive_digits():
    with pytest.raises(ValueError):
        Real(mpmath.mpf(1), 0)
