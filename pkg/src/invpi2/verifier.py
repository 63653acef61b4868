"""Numeric verification of series for 1/pi^2, the transformation and
remarkable-relation checks, and supercongruences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .mirror import Evaluator, MirrorData, invert_mirror_map
from .numkernel import QuadExt, Real, context, to_mpf
from .seqlang import Node, eval_mod, evaluate, parse
from .series import InsufficientOrder

Exact = Union[Fraction, QuadExt]

#: ratio above which plain partial sums are considered too slow
SLOW_RATIO = 0.9
MAX_TERMS = 20000


def legendre(d: int, p: int) -> int:
    """Legendre symbol (d|p) by Euler's criterion."""
    if p < 3 or p % 2 == 0:
        raise ValueError(f"Legendre symbol needs an odd prime, got {p}")
    r = pow(d % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@dataclass
class FormulaRecord:
    """sum_n A_n (a + b n + c n^2) z^n = r / pi^2."""

    seq: str
    z: Exact
    a: Exact
    b: Exact
    c: Exact
    r: Exact
    name: str = ""
    provenance: str = "user"  # paper-table, hunt, user
    status: str = "unverified"  # confirmed, unverified, failed
    notes: str = ""
    slow: bool = False  # too slow to certify: only ever partially checked

    @property
    def node(self) -> Node:
        return parse(self.seq)


@dataclass
class CongruenceSpec:
    """sum_{n<p} A_n (a + b n + c n^2) z^n = expected * (d|p) * p^2 mod p^m."""

    seq: str
    z: Fraction
    a: Fraction
    b: Fraction
    c: Fraction
    m: int
    expected: int
    d: int = 1
    min_prime: int = 5
    excluded: Sequence[int] = field(default_factory=tuple)
    name: str = ""

    def applies_to(self, p: int) -> bool:
        """p is admissible: above the stated bound, not excluded, and coprime
        to every denominator."""
        if p < self.min_prime or p in self.excluded:
            return False
        return all(Fraction(x).denominator % p for x in (self.z, self.a, self.b, self.c))


@dataclass
class CongruenceReport:
    name: str
    p: int
    m: int
    lhs: int | None
    rhs: int | None
    passed: bool | None  # None when the prime was skipped
    note: str = ""


# -- numeric summation -----------------------------------------------------


@dataclass
class SumResult:
    value: object  # mpf
    tail: object  # bound on the neglected part (mpf)
    terms: int
    method: str  # "ratio" or "cvz"


def _terms(node, z, poly, ctx):
    zv = to_mpf(z, ctx)
    pv = [to_mpf(x, ctx) for x in poly]
    zn = ctx.one
    n = 0
    while True:
        w = pv[0] + n * (pv[1] + n * pv[2])
        yield evaluate(node, n) * zn * w
        zn *= zv
        n += 1


def _window_ratio(terms, w: int = 10) -> float:
    """Per-term decay rate from the largest magnitudes of the last two
    windows of ``w`` terms; robust to terms that oscillate through zero."""
    m1 = max(abs(x) for x in terms[-2 * w : -w])
    m2 = max(abs(x) for x in terms[-w:])
    if m1 == 0:
        return 0.0 if m2 == 0 else math.inf
    return float(m2 / m1) ** (1.0 / w)


def _cvz(terms: Sequence, ctx):
    """Cohen-Villegas-Zagier acceleration of sum (-1)^k b_k given the signed
    terms (-1)^k b_k."""
    N = len(terms)
    d = (3 + ctx.sqrt(8)) ** N
    d = (d + 1 / d) / 2
    b = -ctx.one
    c = -d
    s = ctx.zero
    for k in range(N):
        c = b - c
        # b_k = (-1)^k * term_k, so leading zero terms need no special care
        s += c * (terms[k] if k % 2 == 0 else -terms[k])
        b = (k + N) * (k - N) * b / ((k + ctx.mpf(1) / 2) * (k + 1))
    return s / d


def weighted_sum(seq, z, poly, D: int, max_terms: int = MAX_TERMS) -> SumResult:
    """sum_n A_n (poly[0] + poly[1] n + poly[2] n^2) z^n at D digits.

    Plain partial sums with a geometric tail bound while the per-term
    decay rate (measured over windows of ten terms) stays below 0.9.
    Alternating series whose rate tends to 1 go through the
    Cohen-Villegas-Zagier transform, with the error estimated by comparing
    two transform lengths.
    """
    node = parse(seq) if isinstance(seq, str) else seq
    ctx = context(D + 15)
    eps = ctx.mpf(10) ** (-D - 5)
    gen = _terms(node, z, poly, ctx)
    terms = []
    total = ctx.zero
    probe = 40
    for n in range(max_terms):
        t = next(gen)
        terms.append(t)
        total += t
        if n >= probe and n % 10 == 0:
            r = _window_ratio(terms)
            if r < SLOW_RATIO:
                rw = ctx.mpf(r) ** 10
                tail = 10 * max(abs(x) for x in terms[-10:]) * rw / (1 - rw)
                if tail <= eps * max(abs(total), eps):
                    return SumResult(total, tail, n + 1, "ratio")
            elif _alternating(terms[-11:]) and r < 1.05:
                return _accelerate(terms, gen, ctx, D, max_terms)
            elif r >= 1.05:
                raise ArithmeticError(f"series diverges (term ratio {r:.3f})")
    raise InsufficientOrder(f"tail bound not reached within {max_terms} terms")


def _alternating(window) -> bool:
    return all((x > 0) != (y > 0) for x, y in zip(window, window[1:]) if x and y)


def _accelerate(terms, gen, ctx, D, max_terms) -> SumResult:
    need = int(1.35 * (D + 15)) + 20
    while len(terms) < need:
        if len(terms) >= max_terms:
            raise InsufficientOrder("too many terms for the alternating transform")
        terms.append(next(gen))
    full = _cvz(terms[:need], ctx)
    short = _cvz(terms[: need - 15], ctx)
    return SumResult(full, abs(full - short), need, "cvz")


def matched_digits(value, target, D: int) -> int:
    ctx = value.context
    err = abs(value - target)
    if err == 0:
        return D
    scale = max(abs(target), ctx.mpf(10) ** (-D))
    return max(0, min(D, int(math.floor(-ctx.log10(err / scale)))))


def verify_formula(F: FormulaRecord, D: int = 50, max_terms: int = MAX_TERMS) -> int:
    """Digits to which sum A_n (a + bn + cn^2) z^n agrees with r/pi^2
    (capped at D; the tail bound must also certify those digits)."""
    ctx = context(D + 15)
    target = to_mpf(F.r, ctx) / ctx.pi**2
    if all(QuadExt.coerce(x) == QuadExt(0) for x in (F.a, F.b, F.c)):
        return D if target == 0 else 0
    res = weighted_sum(F.seq, F.z, (F.a, F.b, F.c), D, max_terms)
    digits = matched_digits(res.value, target, D)
    if res.tail:
        digits = min(digits, max(0, int(-ctx.log10(res.tail / max(abs(target), ctx.mpf(10) ** -D)))))
    return digits


def partial_digits(F: FormulaRecord, nterms: int, D: int = 30) -> int:
    """Agreement of the plain partial sum of ``nterms`` terms with r/pi^2;
    no tail guarantee.  Used for series too slow to certify."""
    ctx = context(D + 15)
    gen = _terms(F.node, F.z, (F.a, F.b, F.c), ctx)
    s = ctx.fsum(next(gen) for _ in range(nterms))
    return matched_digits(s, to_mpf(F.r, ctx) / ctx.pi**2, D)


# -- structural checks ---------------------------------------------------------


def check_remarkable_relation(M: MirrorData, D: int = 60, u: int = -1, h=10):
    """|(t0+pi)^3/6 - 5/6 pi^2 (t0+pi) - pi^3/3 - h zeta(3) - T(q0)| at
    z0 = u 2^-10, where q0 = q(z0) and t0 = log|q0|."""
    z0 = Fraction(u, 1024)
    q0 = invert_mirror_map(M, z0, D)
    ctx = context(D + 10)
    if (q0.value > 0) != (u > 0):
        raise ArithmeticError("mirror map inversion landed on the wrong side")
    ev = Evaluator(M, u, D + 10)
    t0 = ctx.log(abs(q0.value))
    pt = ev.at("q", t0)
    pi = ctx.pi
    s = t0 + pi
    res = s**3 / 6 - 5 * pi**2 * s / 6 - pi**3 / 3 - to_mpf(h, ctx) * ctx.zeta(3) - pt.T
    return Real(abs(res), D)


@dataclass
class TransformationReport:
    z: Fraction
    lhs: object
    rhs_printed: object  # with (1 - 4z)^(-1/2)
    rhs_plus: object  # with (1 + 4z)^(-1/2)
    residual_printed: object
    residual_plus: object
    consistent: str  # "printed", "plus" or "neither"


SEQ_T6 = "binom(2*n,n)^4*binom(4*n,2*n)"
SEQ_77 = "binom(2*n,n)*sum(i,0,n,binom(n,i)*binom(2*i,i)^3*binom(4*i,2*i))"


def check_transformation_77(D: int = 40, z=Fraction(1, 10**5)) -> TransformationReport:
    """Compare sum C(2n,n)^4 C(4n,2n) z^n with (1 -+ 4z)^(-1/2) sum A_n (z/(1+4z))^n.

    Both sides are summed independently.  ``z`` must lie inside both
    radii of convergence (|z| < 1/4096 on the left); otherwise an
    ArithmeticError reports the divergence.
    """
    z = Fraction(z)
    ctx = context(D + 15)
    if z == 0:
        one = ctx.one
        return TransformationReport(z, one, one, one, ctx.zero, ctx.zero, "both")
    if abs(z) >= Fraction(1, 4096):
        raise ArithmeticError(f"z = {z} lies outside the radius 1/4096 of the left-hand series")
    lhs = weighted_sum(SEQ_T6, z, (1, 0, 0), D).value
    w = z / (1 + 4 * z)
    inner = weighted_sum(SEQ_77, w, (1, 0, 0), D).value
    zv = to_mpf(z, ctx)
    printed = inner / ctx.sqrt(1 - 4 * zv)
    plus = inner / ctx.sqrt(1 + 4 * zv)
    rp, rq = abs(lhs - printed), abs(lhs - plus)
    tol = ctx.mpf(10) ** (-(D - 5))
    consistent = "printed" if rp < tol else "plus" if rq < tol else "neither"
    return TransformationReport(z, lhs, printed, plus, rp, rq, consistent)


# -- supercongruences ----------------------------------------------------------


def _mod_fraction(x: Fraction, mod: int, p: int) -> int:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ZeroDivisionError(f"denominator of {x} is divisible by p = {p}")
    return x.numerator * pow(x.denominator, -1, mod) % mod


def congruence_residue(C: CongruenceSpec, p: int, m: int | None = None) -> tuple[int, int]:
    """(left side mod p^m, expected right side mod p^m)."""
    m = C.m if m is None else m
    if p < 3:
        raise ValueError("congruences are checked for odd primes only")
    if p in C.excluded:
        raise ValueError(f"p = {p} is excluded for this congruence")
    mod = p**m
    node = parse(C.seq)
    zr = _mod_fraction(C.z, mod, p)
    a, b, c = (_mod_fraction(x, mod, p) for x in (C.a, C.b, C.c))
    total = 0
    zn = 1
    for n in range(p):
        total += eval_mod(node, n, mod) * (a + b * n + c * n * n) * zn
        zn = zn * zr % mod
    rhs = C.expected * legendre(C.d, p) * p * p % mod
    return total % mod, rhs


def check_supercongruence(C: CongruenceSpec, p: int, m: int | None = None) -> bool:
    lhs, rhs = congruence_residue(C, p, m)
    return lhs == rhs


def best_exponent(C: CongruenceSpec, p: int, cap: int = 8) -> int:
    """Largest m <= cap for which the congruence holds mod p^m (0 if none).
    Reported, not asserted, for the non-hypergeometric cases."""
    best = 0
    for m in range(1, cap + 1):
        if check_supercongruence(C, p, m):
            best = m
        else:
            break
    return best
