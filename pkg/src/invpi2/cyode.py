"""Differential operators in theta form and their Frobenius solutions.

An operator is ``L = sum_m z^m Q_m(theta)`` with ``theta = z d/dz`` and each
``Q_m`` a polynomial with rational coefficients, stored lowest degree first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .series import PowerSeries

Poly = tuple  # tuple of Fractions, lowest degree first


# -- polynomial helpers over Q -------------------------------------------


def _trim(p) -> Poly:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(Fraction(c) for c in p) if p else (Fraction(0),)


def poly_mul(a: Sequence, b: Sequence) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_add(a: Sequence, b: Sequence) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_scale(a: Sequence, c) -> Poly:
    return _trim([c * x for x in a])


def poly_eval(p: Sequence, x):
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_deriv(p: Sequence) -> Poly:
    if len(p) == 1:
        return (Fraction(0),)
    return _trim([k * p[k] for k in range(1, len(p))])


def poly_from_roots(roots: Sequence, lead=1) -> Poly:
    """``lead * prod (x + r)`` for r in roots."""
    p: Poly = (Fraction(lead),)
    for r in roots:
        p = poly_mul(p, (Fraction(r), Fraction(1)))
    return p


# -- operators ----------------------------------------------------------------


@dataclass(frozen=True)
class ThetaOperator:
    """``sum_m z^m Q_m(theta)``; ``terms[m]`` lists Q_m's coefficients in
    ascending powers of theta."""

    order: int
    terms: Mapping[int, Poly] = field(hash=False)

    def __post_init__(self):
        clean = {}
        for m, q in self.terms.items():
            if m < 0:
                raise ValueError("operator terms need nonnegative z-powers")
            q = _trim(q)
            if len(q) - 1 > self.order:
                raise ValueError(f"Q_{m} has degree {len(q) - 1} > order {self.order}")
            if any(q):
                clean[int(m)] = q
        if 0 not in clean:
            raise ValueError("Q_0 must be present")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __eq__(self, other):
        return isinstance(other, ThetaOperator) and self.order == other.order and self.terms == other.terms

    def __hash__(self):
        return hash((self.order, tuple(self.terms.items())))

    @property
    def degree_z(self) -> int:
        return max(self.terms)

    def Q(self, m: int) -> Poly:
        return self.terms.get(m, (Fraction(0),))

    def apply(self, y: PowerSeries) -> PowerSeries:
        """L applied to a power series, (Ly)[n] = sum_m Q_m(n - m) y[n - m]."""
        out = []
        for n in range(len(y)):
            acc = y.zero
            for m, q in self.terms.items():
                if m <= n:
                    acc += poly_eval(q, Fraction(n - m)) * y[n - m]
            out.append(acc)
        return PowerSeries(out)

    def to_text(self) -> str:
        lines = [f"order {self.order}"]
        for m, q in self.terms.items():
            lines.append(f"{m}: " + " ".join(str(c) for c in q))
        return "\n".join(lines) + "\n"

    def __str__(self):
        parts = []
        for m, q in self.terms.items():
            mono = " + ".join(f"({c})θ^{k}" for k, c in enumerate(q) if c)
            parts.append(("" if m == 0 else f"z^{m}·") + f"[{mono}]")
        return " + ".join(parts)


def parse_operator(text: str) -> ThetaOperator:
    """Read the operator text format.

    ::

        # comment
        order 5
        0: 0 0 0 0 0 1
        1: -16 -160 -640 -1280 -1280 -512

    Line ``m:`` gives the coefficients of Q_m in ascending powers of theta.
    Rational entries such as ``-3/2`` are accepted; all coefficients are then
    multiplied by a common denominator so the stored operator is integral.
    """
    order = None
    terms: dict[int, list[Fraction]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("order"):
            try:
                order = int(line.split()[1])
            except (IndexError, ValueError):
                raise ValueError(f"line {lineno}: malformed order line") from None
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'm: c0 c1 ...'")
        try:
            m = int(head)
            cs = [Fraction(tok) for tok in rest.split()]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if m in terms:
            raise ValueError(f"line {lineno}: Q_{m} given twice")
        terms[m] = cs
    if order is None:
        raise ValueError("missing 'order r' line")
    den = 1
    for cs in terms.values():
        for c in cs:
            den = den * c.denominator // math.gcd(den, c.denominator)
    return ThetaOperator(order, {m: tuple(c * den for c in cs) for m, cs in terms.items()})


# -- hypergeometric cases -------------------------------------------------


@dataclass(frozen=True)
class CaseSpec:
    """One row of the hypergeometric table: parameters s1, s2 and the scale rho,
    plus the binomial form of A_n in the sequence language."""

    id: str
    s1: Fraction
    s2: Fraction
    rho: Fraction
    binomial_form: str = ""

    def __post_init__(self):
        for name in ("s1", "s2", "rho"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (0 < self.s1 < 1 and 0 < self.s2 < 1):
            raise ValueError("s1, s2 must lie in (0, 1)")
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    @property
    def params(self) -> tuple:
        h = Fraction(1, 2)
        return (h, self.s1, 1 - self.s1, self.s2, 1 - self.s2)

    def pochhammer_term(self, n: int) -> Fraction:
        """prod_i (a_i)_n / n!^5, the coefficient without the rho^n scale."""
        out = Fraction(1)
        for k in range(n):
            for a in self.params:
                out *= a + k
            out /= (k + 1) ** 5
        return out


def hypergeometric_operator(case: CaseSpec) -> ThetaOperator:
    """theta^5 - rho z (theta+1/2)(theta+s1)(theta+1-s1)(theta+s2)(theta+1-s2)."""
    q0 = (0, 0, 0, 0, 0, 1)
    q1 = poly_from_roots(case.params, -case.rho)
    return ThetaOperator(5, {0: q0, 1: q1})


def check_mum(L: ThetaOperator) -> bool:
    """Q_0 is a nonzero multiple of theta^r."""
    q0 = L.Q(0)
    return len(q0) == L.order + 1 and all(c == 0 for c in q0[:-1]) and q0[-1] != 0


def leading_polynomial(L: ThetaOperator) -> list[Fraction]:
    """Coefficient of theta^r as a polynomial in z (ascending)."""
    out = []
    for m in range(L.degree_z + 1):
        q = L.Q(m)
        out.append(Fraction(q[L.order]) if len(q) > L.order else Fraction(0))
    return out


def singular_radius(L: ThetaOperator, digits: int = 30):
    """Distance from 0 to the nearest nonzero root of the leading
    polynomial, which bounds the radius of convergence of the holomorphic
    solution; None if the leading polynomial is constant."""
    from .numkernel import context, to_mpf

    P = leading_polynomial(L)
    while len(P) > 1 and P[-1] == 0:
        P.pop()
    if len(P) == 1:
        return None
    ctx = context(digits)
    roots = ctx.polyroots([to_mpf(c, ctx) for c in reversed(P)], maxsteps=200, extraprec=2 * digits)
    return min(abs(r) for r in roots if r != 0)


# -- epsilon polynomials -------------------------------------------------


def _eps_mul(a, b, deg):
    out = [Fraction(0)] * (deg + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), deg + 1 - i)):
                out[i + j] += x * b[j]
    return out


def _eps_inv(a, deg):
    inv0 = 1 / a[0]
    out = [inv0]
    for k in range(1, deg + 1):
        s = sum(a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1))
        out.append(-s * inv0)
    return out


def _taylor_shift(q: Poly, x: Fraction, deg: int):
    """Coefficients of Q(x + eps) in eps up to eps^deg."""
    out = []
    d = q
    fact = 1
    for j in range(deg + 1):
        out.append(poly_eval(d, x) / fact)
        d = poly_deriv(d)
        fact *= j + 1
    return out


@dataclass(frozen=True)
class FrobeniusBasis:
    """Pure-series strata a_0..a_{r-1}: the solution w_j equals
    sum_{i<=j} a_i log^{j-i}(z)/(j-i)!."""

    a: tuple

    @property
    def order(self) -> int:
        return self.a[0].order

    def __getitem__(self, i):
        return self.a[i]

    def __len__(self):
        return len(self.a)


def frobenius_eps(L: ThetaOperator, N: int) -> list[list[Fraction]]:
    """A_n(eps) for n = 0..N, each truncated at eps-degree r - 1."""
    if not check_mum(L):
        raise ValueError("operator is not MUM at z = 0; Frobenius basis undefined")
    r = L.order
    deg = r - 1
    lead = L.Q(0)[-1]
    A = [[Fraction(1)] + [Fraction(0)] * deg]
    for n in range(1, N + 1):
        rhs = [Fraction(0)] * (deg + 1)
        for m, q in L.terms.items():
            if m == 0 or m > n:
                continue
            qs = _taylor_shift(q, Fraction(n - m), deg)
            prod = _eps_mul(qs, A[n - m], deg)
            for k in range(deg + 1):
                rhs[k] -= prod[k]
        # Q_0(n + eps) = lead * (n + eps)^r
        base = [Fraction(math.comb(r, j) * n ** (r - j)) * lead for j in range(min(r, deg) + 1)]
        A.append(_eps_mul(rhs, _eps_inv(base, deg), deg))
    return A


def frobenius_solve(L: ThetaOperator, N: int) -> FrobeniusBasis:
    """Solve the epsilon recurrence and split A_n(eps) into strata a_i[n] = [eps^i]A_n."""
    A = frobenius_eps(L, N)
    r = L.order
    return FrobeniusBasis(tuple(PowerSeries([A[n][i] for n in range(N + 1)]) for i in range(r)))


def eps_residual(L: ThetaOperator, A: Sequence, n: int) -> list[Fraction]:
    """sum_m Q_m(n - m + eps) A_{n-m}(eps) truncated at degree r - 1; zero for
    n >= 1 on a correct solution."""
    deg = L.order - 1
    out = [Fraction(0)] * (deg + 1)
    for m, q in L.terms.items():
        if m <= n:
            prod = _eps_mul(_taylor_shift(q, Fraction(n - m), deg), A[n - m], deg)
            for k in range(deg + 1):
                out[k] += prod[k]
    return out


# -- d/dz form and the CY conditions ---------------------------------------


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@dataclass(frozen=True)
class RatFunc:
    """num/den over Q[z], not reduced; equality by cross multiplication."""

    num: Poly
    den: Poly = (Fraction(1),)

    def __post_init__(self):
        object.__setattr__(self, "num", _trim(self.num))
        object.__setattr__(self, "den", _trim(self.den))
        if not any(self.den):
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls((Fraction(c),))

    def __add__(self, o):
        o = _as_rf(o)
        return RatFunc(poly_add(poly_mul(self.num, o.den), poly_mul(o.num, self.den)), poly_mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(poly_scale(self.num, -1), self.den)

    def __sub__(self, o):
        return self + (-_as_rf(o))

    def __rsub__(self, o):
        return _as_rf(o) - self

    def __mul__(self, o):
        o = _as_rf(o)
        return RatFunc(poly_mul(self.num, o.num), poly_mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _as_rf(o)
        return RatFunc(poly_mul(self.num, o.den), poly_mul(self.den, o.num))

    def deriv(self) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(poly_add(poly_mul(poly_deriv(n), d), poly_scale(poly_mul(n, poly_deriv(d)), -1)), poly_mul(d, d))

    def is_zero(self) -> bool:
        return not any(self.num)

    def __eq__(self, o):
        o = _as_rf(o)
        return (self - o).is_zero()

    def __hash__(self):
        return 0


def _as_rf(x) -> RatFunc:
    return x if isinstance(x, RatFunc) else RatFunc.const(x)


def dz_coefficients(L: ThetaOperator) -> list[RatFunc]:
    """Monic d/dz-form: L is proportional to D^r + c_{r-1} D^{r-1} + ... + c_0,
    returned as [c_0, ..., c_{r-1}, 1].

    Uses theta^k = sum_j S(k, j) z^j D^j with Stirling numbers of the second kind.
    """
    r = L.order
    P = [[Fraction(0)] * (L.degree_z + r + 1) for _ in range(r + 1)]
    for m, q in L.terms.items():
        for k, c in enumerate(q):
            if not c:
                continue
            for j in range(k + 1):
                s = _stirling2(k, j)
                if s:
                    P[j][m + j] += c * s
    lead = _trim(P[r])
    if not any(lead):
        raise ValueError("operator has vanishing leading d/dz coefficient")
    return [RatFunc(_trim(P[j]), lead) for j in range(r + 1)]


def condition_2_defect(c: Sequence[RatFunc]) -> RatFunc:
    """c1 - (c2 c3/2 - c3^3/8 + c2' - 3 c3 c3'/4 - c3''/2) for a monic 4th-order form."""
    c1, c2, c3 = (_as_rf(x) for x in c[1:4])
    rhs = (
        Fraction(1, 2) * c2 * c3
        - Fraction(1, 8) * c3 * c3 * c3
        + c2.deriv()
        - Fraction(3, 4) * c3 * c3.deriv()
        - Fraction(1, 2) * c3.deriv().deriv()
    )
    return c1 - rhs


def condition_25_defect(d: Sequence[RatFunc]) -> RatFunc:
    """d2 - (3/5 d3 d4 - 4/25 d4^3 + 3/2 d3' - 6/5 d4 d4' - d4'') for a monic 5th-order form."""
    d2, d3, d4 = (_as_rf(x) for x in d[2:5])
    rhs = (
        Fraction(3, 5) * d3 * d4
        - Fraction(4, 25) * d4 * d4 * d4
        + Fraction(3, 2) * d3.deriv()
        - Fraction(6, 5) * d4 * d4.deriv()
        - d4.deriv().deriv()
    )
    return d2 - rhs


def check_condition_2(L) -> bool:
    """Exact check of the 4th-order coefficient identity.  ``L`` is a
    ThetaOperator of order 4 or a list of monic d/dz coefficients c_0..c_3."""
    if isinstance(L, ThetaOperator):
        if L.order != 4:
            raise ValueError("condition 2 applies to order-4 operators")
        L = dz_coefficients(L)
    return condition_2_defect(L).is_zero()


def check_condition_25(L) -> bool:
    """Exact check of the 5th-order analogue; same input conventions."""
    if isinstance(L, ThetaOperator):
        if L.order != 5:
            raise ValueError("condition 2_5 applies to order-5 operators")
        L = dz_coefficients(L)
    return condition_25_defect(L).is_zero()
