"""Exact and arbitrary-precision scalars, plus the constants the rest of the
package consumes.

Rationals are :class:`fractions.Fraction`.  Floating values live in
per-precision :class:`mpmath.MPContext` instances, so no computation here ever
reads or mutates mpmath's global ``mp`` precision.  :class:`Real` pairs such a
value with its digit count and keeps the min-precision rule on arithmetic.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC

import mpmath

MIN_DIGITS = 20

#: extra decimal digits carried internally by the constant routines
GUARD = 10


@functools.lru_cache(maxsize=None)
def context(digits: int) -> mpmath.MPContext:
    """Return the shared mpmath context working at ``digits`` decimal digits.

    Contexts are created once per precision and never modified afterwards.
    """
    if digits < 1:
        raise ValueError(f"digits must be positive, got {digits}")
    ctx = mpmath.MPContext()
    ctx.dps = digits
    return ctx


def to_mpf(x, ctx: mpmath.MPContext):
    """Convert an int, Fraction, QuadExt, Real or mpf into ``ctx``."""
    if isinstance(x, Real):
        return ctx.mpf(x.value)
    if isinstance(x, QuadExt):
        return x.to_mpf(ctx)
    if isinstance(x, int):
        return ctx.mpf(x)
    if isinstance(x, _RationalABC):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


def mpf_to_fraction(x) -> Fraction:
    """Exact binary value of an mpf as a Fraction."""
    sign, man, exp, _ = x._mpf_
    if not man and exp:
        raise ValueError(f"cannot convert {x} to a Fraction")
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


@dataclass(frozen=True)
class Real:
    """A floating value together with the number of decimal digits it carries."""

    value: object
    digits: int

    def __post_init__(self):
        if self.digits < 1:
            raise ValueError("digits must be positive")

    @classmethod
    def from_value(cls, x, digits: int) -> "Real":
        return cls(to_mpf(x, context(digits)), digits)

    @property
    def ctx(self) -> mpmath.MPContext:
        return context(self.digits)

    def __reduce__(self):
        # mpf classes are per-context, so pickle the raw (sign, man, exp, bc) tuple
        return (_real_from_raw, (self.value._mpf_, self.digits))

    def _coerce(self, other):
        if isinstance(other, Real):
            d = min(self.digits, other.digits)
            ctx = context(d)
            return ctx, ctx.mpf(self.value), ctx.mpf(other.value), d
        ctx = self.ctx
        return ctx, self.value, to_mpf(other, ctx), self.digits

    def __add__(self, other):
        ctx, a, b, d = self._coerce(other)
        return Real(a + b, d)

    __radd__ = __add__

    def __sub__(self, other):
        ctx, a, b, d = self._coerce(other)
        return Real(a - b, d)

    def __rsub__(self, other):
        ctx, a, b, d = self._coerce(other)
        return Real(b - a, d)

    def __mul__(self, other):
        ctx, a, b, d = self._coerce(other)
        return Real(a * b, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        ctx, a, b, d = self._coerce(other)
        return Real(a / b, d)

    def __rtruediv__(self, other):
        ctx, a, b, d = self._coerce(other)
        return Real(b / a, d)

    def __neg__(self):
        return Real(-self.value, self.digits)

    def __abs__(self):
        return Real(abs(self.value), self.digits)

    def __pow__(self, k: int):
        return Real(self.value**k, self.digits)

    def __lt__(self, other):
        ctx, a, b, _ = self._coerce(other)
        return a < b

    def __gt__(self, other):
        ctx, a, b, _ = self._coerce(other)
        return a > b

    def __float__(self):
        return float(self.value)

    def at(self, digits: int) -> "Real":
        """Re-express at a different precision (rounding if lower)."""
        return Real(context(digits).mpf(self.value), digits)

    def close_to(self, other, digits: int | None = None) -> bool:
        """True if the two values agree to ``digits`` significant digits."""
        ctx, a, b, d = self._coerce(other)
        digits = d if digits is None else digits
        scale = max(abs(a), abs(b), ctx.mpf(1))
        return abs(a - b) <= scale * ctx.mpf(10) ** (-digits)

    def __str__(self):
        return mpmath.nstr(self.value, self.digits)

    def __repr__(self):
        return f"Real({self}, digits={self.digits})"


def _real_from_raw(raw, digits: int) -> Real:
    return Real(context(digits).make_mpf(raw), digits)


def _check_digits(D: int) -> None:
    if D < MIN_DIGITS:
        raise ValueError(f"working precision must be at least {MIN_DIGITS} digits, got {D}")


def const_pi(D: int) -> Real:
    _check_digits(D)
    return Real(context(D).pi, D)


def const_zeta3(D: int) -> Real:
    _check_digits(D)
    return Real(context(D).zeta(3), D)


@functools.lru_cache(maxsize=256)
def _hurwitz_zeta3_mpf(s: Fraction, D: int):
    ctx = context(D + GUARD)
    x = ctx.mpf(s.numerator) / s.denominator
    N = max(50, D)
    total = ctx.fsum((n + x) ** -3 for n in range(N))
    a = N + x
    total += 1 / (2 * a * a) + 1 / (2 * a**3)
    eps = ctx.mpf(10) ** (-D - 5)
    inv_a2 = 1 / (a * a)
    power = inv_a2 * inv_a2  # (N+s)^(-2-2k) at k = 1
    rising = ctx.mpf(3)  # (3)_{2k-1} at k = 1
    fact = ctx.mpf(2)  # (2k)! at k = 1
    k = 1
    while True:
        term = ctx.bernoulli(2 * k) / fact * rising * power
        total += term
        if abs(term) < eps:
            break
        if k > 4 * N:
            raise ArithmeticError("Euler-Maclaurin correction failed to converge")
        k += 1
        rising *= (2 * k) * (2 * k + 1)
        fact *= (2 * k - 1) * (2 * k)
        power *= inv_a2
    return total


def hurwitz_zeta3(s, D: int) -> Real:
    """zeta(3, s) = sum over n >= 0 of (n+s)^-3, for rational 0 < s <= 1.

    Euler-Maclaurin: max(50, D) explicit terms, then Bernoulli corrections
    until the next one drops below 10^-(D+5).
    """
    _check_digits(D)
    s = Fraction(s)
    if not 0 < s <= 1:
        raise ValueError(f"hurwitz_zeta3 needs 0 < s <= 1, got {s}")
    return Real(context(D).mpf(_hurwitz_zeta3_mpf(s, D)), D)


def trig_at_rational(kind: str, s, D: int) -> Real:
    """sin(pi*s) or cot(pi*s) for rational 0 < s < 1."""
    _check_digits(D)
    s = Fraction(s)
    if not 0 < s < 1:
        raise ValueError(f"trig_at_rational needs 0 < s < 1, got {s}")
    ctx = context(D + GUARD)
    x = ctx.mpf(s.numerator) / s.denominator
    if kind == "sin":
        v = ctx.sinpi(x)
    elif kind == "cot":
        v = ctx.cospi(x) / ctx.sinpi(x)
    else:
        raise ValueError(f"unknown kind {kind!r}; expected 'sin' or 'cot'")
    return Real(context(D).mpf(v), D)


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Write ``n > 0`` as ``m**2 * d`` with ``d`` squarefree; returns (m, d).

    Trial division up to 10**6; a leftover cofactor is treated as squarefree
    unless it is itself a perfect square.
    """
    if n <= 0:
        raise ValueError("squarefree_decomposition needs a positive integer")
    m, d = 1, 1
    p = 2
    while p * p <= n and p <= 10**6:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            m *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    if n > 1:
        r = math.isqrt(n)
        if r * r == n:
            m *= r
        else:
            d *= n
    return m, d


@dataclass(frozen=True)
class QuadExt:
    """rat + coef * sqrt(disc) with rational parts and squarefree ``disc``."""

    rat: Fraction
    coef: Fraction = Fraction(0)
    disc: int = 1

    def __post_init__(self):
        rat, coef, disc = Fraction(self.rat), Fraction(self.coef), int(self.disc)
        if disc <= 0:
            raise ValueError("QuadExt discriminant must be positive")
        m, d = squarefree_decomposition(disc)
        coef *= m
        if d == 1:
            rat, coef = rat + coef, Fraction(0)
        if coef == 0:
            d = 1
        object.__setattr__(self, "rat", rat)
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "disc", d)

    @classmethod
    def coerce(cls, x) -> "QuadExt":
        if isinstance(x, QuadExt):
            return x
        return cls(Fraction(x))

    @property
    def is_rational(self) -> bool:
        return self.coef == 0

    def _disc_with(self, other: "QuadExt") -> int:
        if self.is_rational:
            return other.disc
        if other.is_rational or other.disc == self.disc:
            return self.disc
        raise ValueError(f"cannot combine sqrt({self.disc}) and sqrt({other.disc})")

    def __add__(self, other):
        other = QuadExt.coerce(other)
        d = self._disc_with(other)
        return QuadExt(self.rat + other.rat, self.coef + other.coef, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.rat, -self.coef, self.disc)

    def __sub__(self, other):
        return self + (-QuadExt.coerce(other))

    def __rsub__(self, other):
        return QuadExt.coerce(other) - self

    def __mul__(self, other):
        other = QuadExt.coerce(other)
        d = self._disc_with(other)
        return QuadExt(
            self.rat * other.rat + d * self.coef * other.coef,
            self.rat * other.coef + self.coef * other.rat,
            d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.rat, -self.coef, self.disc)

    def norm(self) -> Fraction:
        return self.rat**2 - self.disc * self.coef**2

    def __truediv__(self, other):
        other = QuadExt.coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in QuadExt")
        num = self * other.conjugate()
        return QuadExt(num.rat / n, num.coef / n, num.disc)

    def __rtruediv__(self, other):
        return QuadExt.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return QuadExt(1) / self**-k
        out = QuadExt(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadExt(Fraction(other))
        if not isinstance(other, QuadExt):
            return NotImplemented
        return (self.rat, self.coef, self.disc) == (other.rat, other.coef, other.disc)

    def __hash__(self):
        return hash((self.rat, self.coef, self.disc))

    def to_mpf(self, ctx):
        v = ctx.mpf(self.rat.numerator) / self.rat.denominator
        if self.coef:
            v += ctx.mpf(self.coef.numerator) / self.coef.denominator * ctx.sqrt(self.disc)
        return v

    def __float__(self):
        return float(self.rat) + float(self.coef) * math.sqrt(self.disc)

    def __str__(self):
        if self.is_rational:
            return str(self.rat)
        if self.rat == 0:
            return f"{self.coef}*sqrt({self.disc})"
        sign = "+" if self.coef > 0 else "-"
        return f"{self.rat} {sign} {abs(self.coef)}*sqrt({self.disc})"


def quad_value(x: QuadExt, D: int) -> Real:
    _check_digits(D)
    ctx = context(D + GUARD)
    return Real(context(D).mpf(QuadExt.coerce(x).to_mpf(ctx)), D)


def _rational_sqrt(r: Fraction) -> QuadExt | None:
    """sqrt of a nonnegative rational as m*sqrt(d)/q."""
    if r < 0:
        return None
    if r == 0:
        return QuadExt(0)
    p, q = r.numerator, r.denominator
    m, d = squarefree_decomposition(p * q)
    return QuadExt(0, Fraction(m, q), d)


def quad_sqrt(x) -> QuadExt | None:
    """Positive square root of ``x`` inside some quadratic field, or None."""
    x = QuadExt.coerce(x)
    if x.is_rational:
        return _rational_sqrt(x.rat)
    a, b, d = x.rat, x.coef, x.disc
    n = a * a - d * b * b
    root_n = _rational_sqrt(n)
    if root_n is None or not root_n.is_rational:
        return None
    s = root_n.rat
    for u2 in ((a + s) / 2, (a - s) / 2):
        u = _rational_sqrt(u2)
        if u is None or not u.is_rational:
            continue
        u = u.rat
        if u == 0:
            continue
        v = b / (2 * u)
        cand = QuadExt(u, v, d)
        if cand * cand == x:
            return cand if float(cand) > 0 else -cand
    return None
