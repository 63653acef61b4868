from fractions import Fraction

import pytest
import sympy

from invpi2.cyode import (
    ThetaOperator,
    check_condition_2,
    check_condition_25,
    check_mum,
    eps_residual,
    frobenius_eps,
    frobenius_solve,
    hypergeometric_operator,
    leading_polynomial,
    parse_operator,
    singular_radius,
)
from invpi2.numkernel import Real
from invpi2.registry import HYPERGEOMETRIC, bundled_operator, bundled_names
from invpi2.seqlang import evaluate
from invpi2.series import PowerSeries

ORDER5 = [n for n in bundled_names(".op") if n != "t8_yy.op"]


def test_t3_operator_shape():
    L = hypergeometric_operator(HYPERGEOMETRIC["t3"])
    assert L.Q(0) == (0, 0, 0, 0, 0, 1)
    # -1024 (theta + 1/2)^5
    expected = [Fraction(-1024) * sympy.binomial(5, k) * Fraction(1, 2) ** (5 - k) for k in range(6)]
    assert list(L.Q(1)) == expected


@pytest.mark.parametrize("cid", sorted(HYPERGEOMETRIC))
def test_operator_annihilates_sequence(cid):
    case = HYPERGEOMETRIC[cid]
    L = hypergeometric_operator(case)
    y = PowerSeries([Fraction(evaluate(case.binomial_form, n)) for n in range(13)])
    assert all(c == 0 for c in L.apply(y).coeffs)


def test_t1_first_term():
    case = HYPERGEOMETRIC["t1"]
    assert case.rho * case.pochhammer_term(1) == 240 == evaluate(case.binomial_form, 1)


@pytest.mark.parametrize("cid", sorted(HYPERGEOMETRIC))
def test_mum_and_condition_25(cid):
    L = hypergeometric_operator(HYPERGEOMETRIC[cid])
    assert check_mum(L)
    assert check_condition_25(L)


@pytest.mark.parametrize("name", ORDER5)
def test_bundled_operators(name):
    L = bundled_operator(name)
    assert L.order == 5
    assert check_mum(L)
    assert check_condition_25(L)


def test_mum_counterexample():
    # theta^4 - z (theta+1)^4 with Q0 replaced by theta^3 (theta - 1)
    L = ThetaOperator(4, {0: (0, 0, 0, -1, 1), 1: (-1, -4, -6, -4, -1)})
    assert not check_mum(L)
    with pytest.raises(ValueError):
        frobenius_solve(L, 5)


def test_condition_2_examples():
    assert check_condition_2(bundled_operator("t8_yy.op"))
    zero = [Fraction(0)] * 4
    assert check_condition_2(zero)
    assert not check_condition_2([Fraction(0), Fraction(1), Fraction(0), Fraction(0)])


def test_condition_25_counterexample():
    assert check_condition_25(ThetaOperator(5, {0: (0, 0, 0, 0, 0, 1), 1: (0, 0, 0, 0, 0, -1)}))
    assert not check_condition_25(ThetaOperator(5, {0: (0, 0, 0, 0, 0, 1), 1: (0, 0, 0, 0, -1)}))


def test_condition_order_mismatch():
    with pytest.raises(ValueError):
        check_condition_2(hypergeometric_operator(HYPERGEOMETRIC["t3"]))


def test_frobenius_t3():
    F = frobenius_solve(hypergeometric_operator(HYPERGEOMETRIC["t3"]), 6)
    assert F[0].coeffs[:3] == (1, 32, 7776)
    assert [F[i].coeffs[0] for i in range(5)] == [1, 0, 0, 0, 0]


def test_frobenius_eps_against_symbolic_derivative():
    # A_1(eps) = 1024 (eps + 1/2)^5 / (eps + 1)^5 for case t3
    eps = sympy.symbols("eps")
    A1 = 1024 * (eps + sympy.Rational(1, 2)) ** 5 / (eps + 1) ** 5
    F = frobenius_solve(hypergeometric_operator(HYPERGEOMETRIC["t3"]), 3)
    for i in range(5):
        want = sympy.diff(A1, eps, i).subs(eps, 0) / sympy.factorial(i)
        assert F[i].coeffs[1] == Fraction(int(want.p), int(want.q))


@pytest.mark.parametrize("cid", ["t1", "t3", "t8", "t13"])
def test_eps_recurrence_residual(cid):
    L = hypergeometric_operator(HYPERGEOMETRIC[cid])
    A = frobenius_eps(L, 15)
    for n in range(1, 16):
        assert all(c == 0 for c in eps_residual(L, A, n))


@pytest.mark.parametrize("name", ORDER5[:3])
def test_eps_recurrence_residual_bundled(name):
    L = bundled_operator(name)
    A = frobenius_eps(L, 12)
    assert all(all(c == 0 for c in eps_residual(L, A, n)) for n in range(1, 13))


def test_operator_text_roundtrip():
    L = bundled_operator("a_alpha.op")
    assert parse_operator(L.to_text()) == L


@pytest.mark.parametrize("bad", ["", "order 5\n1: 1 2\n", "order 2\n0: 0 0 1 3\n", "order x\n0: 1\n"])
def test_parse_operator_errors(bad):
    with pytest.raises(ValueError):
        parse_operator(bad)


def test_singular_radius():
    L = hypergeometric_operator(HYPERGEOMETRIC["t3"])
    assert leading_polynomial(L) == [1, -1024]
    assert Real(singular_radius(L), 30).close_to(Fraction(1, 1024), 25)
    # Domb-type product: leading polynomial (1 - 64 z)(1 - 256 z)... smallest root sets the radius
    La = bundled_operator("a_alpha.op")
    assert Real(singular_radius(La), 30).close_to(Fraction(1, 256), 25)
