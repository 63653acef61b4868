import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from invpi2.registry import HYPERGEOMETRIC
from invpi2.seqlang import SeqError, eval_mod, evaluate, parse, pretty

A_ALPHA = "binom(2*n,n)^2 * sum(i,0,n, binom(n,i)^2*binom(2*i,i)*binom(2*n-2*i,n-i))"
A_DELTA = "binom(2*n,n)^2*sum(i,0,n,pow(-1,i)*pow(3,n-3*i)*fact(3*i)/fact(i)^3*binom(n,3*i)*binom(n+i,i))"
C_THETA = "binom(2*n,n)*binom(4*n,2*n)*sum(i,0,n,pow(16,n-i)*binom(2*i,i)^3*binom(2*n-2*i,n-i))"
B_BETA = "fact(3*n)/fact(n)^3*sum(i,0,n,binom(2*i,i)^2*binom(2*n-2*i,n-i)^2)"

EXPRS = [c.binomial_form for c in HYPERGEOMETRIC.values()] + [A_ALPHA, A_DELTA, C_THETA, B_BETA]


def test_parse_examples():
    assert evaluate(parse("binom(2*n,n)^5"), 2) == 7776
    assert evaluate(A_ALPHA, 1) == 16
    assert evaluate(HYPERGEOMETRIC["t3"].binomial_form, 1) == 32
    assert evaluate(HYPERGEOMETRIC["t8"].binomial_form, 1) == 720
    assert evaluate(A_DELTA, 0) == 1


def test_whitespace_insensitive():
    assert evaluate(" binom ( 2 * n , n ) ^ 2 ", 5) == comb(10, 5) ** 2


@pytest.mark.parametrize(
    "bad",
    ["sum(j,0,n,foo(j))", "binom(2*n)", "binom(2*n,n", "m+1", "n^-1", "", "sum(i,0,n,binom(n,k))"],
)
def test_parse_errors(bad):
    with pytest.raises(SeqError):
        parse(bad)


def test_error_position():
    with pytest.raises(SeqError, match="column"):
        parse("binom(2*n,,n)")


def test_negative_binomial_argument():
    with pytest.raises(SeqError):
        evaluate("binom(n-3,n)", 1)


def test_non_integer_term():
    with pytest.raises(SeqError):
        evaluate("fact(n)/4", 3)


def test_hadamard_values():
    # sequences against direct Python loops
    def alpha(n):
        return sum(comb(n, i) ** 2 * comb(2 * i, i) * comb(2 * n - 2 * i, n - i) for i in range(n + 1))

    def theta(n):
        return sum(16 ** (n - i) * comb(2 * i, i) ** 3 * comb(2 * n - 2 * i, n - i) for i in range(n + 1))

    for n in range(12):
        assert evaluate(A_ALPHA, n) == comb(2 * n, n) ** 2 * alpha(n)
        assert evaluate(C_THETA, n) == comb(2 * n, n) * comb(4 * n, 2 * n) * theta(n)


@pytest.mark.parametrize("cid", sorted(HYPERGEOMETRIC))
def test_binomial_matches_pochhammer(cid):
    case = HYPERGEOMETRIC[cid]
    for n in range(21):
        assert evaluate(case.binomial_form, n) == case.rho**n * case.pochhammer_term(n)


@pytest.mark.parametrize("text", EXPRS)
def test_pretty_roundtrip(text):
    node = parse(text)
    assert parse(pretty(node)) == node


# random expressions for the round-trip property
leaf = st.sampled_from(["n", "1", "2", "7"])


def _expr(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]}{t[1]}{t[2]})"),
        st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        children.map(lambda c: f"binom(2*n,{c})"),
        children.map(lambda c: f"sum(i,0,n,binom(n,i)*{c})"),
        children.map(lambda c: f"-{c}"),
    )


exprs = st.recursive(leaf, _expr, max_leaves=6)


@given(exprs)
def test_pretty_roundtrip_random(text):
    node = parse(text)
    assert parse(pretty(node)) == node


def test_eval_mod_examples():
    e = parse(HYPERGEOMETRIC["t3"].binomial_form)
    assert eval_mod(e, 3, 7**5) == evaluate(e, 3) % 7**5
    for p in (5, 7, 11, 13):
        assert eval_mod("binom(2*n,n)", p - 1, p) == comb(2 * p - 2, p - 1) % p


def test_eval_mod_rejects_modulus_one():
    with pytest.raises(SeqError):
        eval_mod("n", 3, 1)


def test_eval_mod_randomised():
    rng = random.Random(20240601)
    nodes = [parse(t) for t in EXPRS]
    for _ in range(500):
        e = rng.choice(nodes)
        n = rng.randint(0, 30)
        if rng.random() < 0.5:
            p = rng.choice([2, 3, 5, 7, 11, 13, 17, 19, 23])
            M = p ** rng.randint(1, 6)
            M = min(M, 10**9)
        else:
            M = rng.randint(2, 10**9)
        assert eval_mod(e, n, M) == evaluate(e, n) % M


@given(st.integers(0, 25), st.integers(2, 10**9))
def test_eval_mod_property(n, M):
    e = parse(A_DELTA)
    assert eval_mod(e, n, M) == evaluate(e, n) % M
