"""Dense truncated power series over a generic scalar ring.

A :class:`PowerSeries` stores coefficients ``c[0..N]`` and stands for
``c[0] + c[1] z + ... + c[N] z^N + O(z^(N+1))``.  Scalars may be ``int``,
:class:`~fractions.Fraction`, mpmath ``mpf`` values (from any context), or
anything else closed under ``+ - *`` with exact division by units.

Binary operations truncate to the smaller order of the two operands.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

#: schoolbook below this many coefficients, Karatsuba above.  Truncated
#: products of scaled big integers favour schoolbook well past order 1000
#: (see benchmarks/bench_series.py).
KARATSUBA_CUTOFF = 4096


def _is_mpf(x) -> bool:
    return hasattr(x, "_mpf_")


def _zero_like(x):
    return x - x


def _school(a: Sequence, b: Sequence, n: int) -> list:
    """First ``n`` coefficients of a*b by the schoolbook rule."""
    la, lb = len(a), len(b)
    out = []
    for k in range(n):
        lo = max(0, k - lb + 1)
        hi = min(k, la - 1)
        if lo > hi:
            out.append(_zero_like(a[0]) if la else 0)
            continue
        out.append(sum(a[i] * b[k - i] for i in range(lo + 1, hi + 1)) + a[lo] * b[k - lo])
    return out


def _karatsuba_full(a: list, b: list) -> list:
    """Full product of two equal-length coefficient lists."""
    n = len(a)
    if n <= 32:
        return _school(a, b, 2 * n - 1)
    h = n // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    z0 = _karatsuba_full(a0, b0)
    z2 = _karatsuba_full(a1, b1)
    m = len(a1)
    sa = [a1[i] + (a0[i] if i < h else 0) for i in range(m)]
    sb = [b1[i] + (b0[i] if i < h else 0) for i in range(m)]
    z1 = _karatsuba_full(sa, sb)
    for i, v in enumerate(z0):
        z1[i] -= v
    for i, v in enumerate(z2):
        z1[i] -= v
    out = z0 + [_zero_like(a[0])] * (2 * n - 1 - len(z0))
    for i, v in enumerate(z1):
        out[i + h] += v
    for i, v in enumerate(z2):
        out[i + 2 * h] += v
    return out


def _fdot_conv(a: Sequence, b: Sequence, n: int) -> list:
    ctx = a[0].context
    out = []
    la, lb = len(a), len(b)
    for k in range(n):
        lo = max(0, k - lb + 1)
        hi = min(k, la - 1)
        if lo > hi:
            out.append(ctx.zero)
        else:
            out.append(ctx.fdot(a[lo : hi + 1], b[k - lo : k - hi - 1 if k - hi - 1 >= 0 else None : -1]))
    return out


def _all_rational(xs) -> bool:
    return all(type(x) is int or type(x) is Fraction for x in xs)


def _common_den(xs) -> int:
    d = 1
    for x in xs:
        if type(x) is Fraction and d % x.denominator:
            d = d * x.denominator // math.gcd(d, x.denominator)
    return d


def convolve(a: Sequence, b: Sequence, n: int, method: str = "auto") -> list:
    """First ``n`` coefficients of the product of coefficient lists ``a``, ``b``.

    ``method`` is ``"school"``, ``"karatsuba"``, ``"fdot"`` (mpf only) or
    ``"auto"``: fdot for mpf scalars, Karatsuba past :data:`KARATSUBA_CUTOFF`,
    schoolbook otherwise.
    """
    a, b = list(a[:n]), list(b[:n])
    if not a or not b:
        return [0] * n
    if method == "auto":
        if _is_mpf(a[0]) and _is_mpf(b[0]):
            method = "fdot"
        elif min(len(a), len(b)) > KARATSUBA_CUTOFF:
            method = "karatsuba"
        else:
            method = "school"
    if method == "fdot":
        return _fdot_conv(a, b, n)
    if method in ("school", "karatsuba") and _all_rational(a) and _all_rational(b):
        da, db = _common_den(a), _common_den(b)
        if not (all(type(x) is int for x in a) and all(type(x) is int for x in b)):
            ia = [int(x * da) for x in a]
            ib = [int(x * db) for x in b]
            den = da * db
            out = convolve(ia, ib, n, method)
            return [Fraction(v, den) for v in out]
    if method == "karatsuba":
        m = max(len(a), len(b))
        z = _zero_like(a[0])
        a = a + [z] * (m - len(a))
        b = b + [z] * (m - len(b))
        full = _karatsuba_full(a, b)
        return (full + [z] * n)[:n]
    return _school(a, b, n)


class PowerSeries:
    """Immutable truncated power series; ``order`` is the index of the last
    retained coefficient."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        c = list(coeffs)
        if not c:
            raise ValueError("a power series needs at least one coefficient")
        if order is not None:
            if order < 0:
                raise ValueError("order must be nonnegative")
            z = _zero_like(c[0])
            c = (c + [z] * (order + 1 - len(c)))[: order + 1]
        self._c = tuple(c)

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, order: int) -> "PowerSeries":
        return cls([value], order)

    @classmethod
    def variable(cls, order: int, one=1) -> "PowerSeries":
        """The series ``z`` (needs order >= 1)."""
        zero = one - one
        return cls([zero, one], order)

    @classmethod
    def geometric(cls, order: int, one=1) -> "PowerSeries":
        return cls([one] * (order + 1))

    # -- access -------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self) -> tuple:
        return self._c

    def __getitem__(self, k):
        return self._c[k]

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        head = ", ".join(str(c) for c in self._c[:6])
        more = ", ..." if len(self._c) > 6 else ""
        return f"PowerSeries([{head}{more}], order={self.order})"

    @property
    def zero(self):
        return _zero_like(self._c[0])

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self._c, order)

    def map(self, fn: Callable) -> "PowerSeries":
        """Apply ``fn`` to every coefficient (e.g. a scalar conversion)."""
        return PowerSeries([fn(c) for c in self._c])

    def valuation(self) -> int:
        """Index of the first nonzero coefficient (order+1 if all vanish)."""
        for k, c in enumerate(self._c):
            if c != 0:
                return k
        return len(self._c)

    # -- ring operations ---------------------------------------------
    def _lift(self, other):
        if isinstance(other, PowerSeries):
            return other
        return PowerSeries([other], self.order)

    def __add__(self, other):
        other = self._lift(other)
        n = min(len(self), len(other))
        return PowerSeries([self._c[k] + other._c[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-c for c in self._c])

    def __sub__(self, other):
        other = self._lift(other)
        n = min(len(self), len(other))
        return PowerSeries([self._c[k] - other._c[k] for k in range(n)])

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([c * other for c in self._c])
        n = min(len(self), len(other))
        return PowerSeries(convolve(self._c, other._c, n))

    def __rmul__(self, other):
        return PowerSeries([other * c for c in self._c])

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([c / other for c in self._c])
        return self * other.reciprocal(min(self.order, other.order))

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        result = PowerSeries([_one_like(self._c[0])], self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def reciprocal(self, order: int | None = None) -> "PowerSeries":
        """1/self; needs an invertible constant term."""
        c = self._c
        n = self.order if order is None else min(order, self.order)
        if c[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = _one_like(c[0]) / c[0]
        out = [inv0]
        mpf = _is_mpf(c[0])
        for k in range(1, n + 1):
            if mpf:
                s = c[0].context.fdot(c[1 : k + 1], out[::-1])
            else:
                s = sum(c[i] * out[k - i] for i in range(1, k + 1))
            out.append(-s * inv0)
        return PowerSeries(out)

    # -- calculus -----------------------------------------------------
    def theta(self) -> "PowerSeries":
        """z d/dz: multiplies coefficient n by n."""
        return PowerSeries([k * c for k, c in enumerate(self._c)])

    def derivative(self) -> "PowerSeries":
        """d/dz; the result has order one less (at least 0)."""
        if len(self._c) == 1:
            return PowerSeries([self.zero])
        return PowerSeries([k * self._c[k] for k in range(1, len(self._c))])

    def integral_theta(self) -> "PowerSeries":
        """Inverse of :meth:`theta` on series without constant term."""
        if self._c[0] != 0:
            raise ValueError("integral over dz/z needs a vanishing constant term")
        return PowerSeries([self.zero] + [self._c[k] / k for k in range(1, len(self._c))])

    # -- composition and reversion -------------------------------------
    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(z)), truncated to the smaller order.

        Brent-Kung baby-step/giant-step: about 2*sqrt(N) series products.
        """
        if inner[0] != 0:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        f = self._c[: n + 1]
        g = inner.truncate(n)
        if n == 0:
            return PowerSeries([f[0]])
        m = max(1, math.isqrt(n + 1))
        one = _one_like(g[1] if g[1] != 0 else f[0])
        powers = [PowerSeries([one], n), g]
        for _ in range(2, m + 1):
            powers.append(powers[-1] * g)
        giant = powers[m]
        blocks = []
        zero = _zero_like(f[0] * one)
        mpf = _is_mpf(zero)
        for start in range(0, n + 1, m):
            cs = f[start : start + m]
            coeffs = []
            for k in range(n + 1):
                # powers[i] has valuation >= i, so only i <= k contribute
                top = min(len(cs), k + 1)
                if mpf:
                    coeffs.append(zero.context.fdot(cs[:top], [powers[i]._c[k] for i in range(top)]))
                else:
                    acc = zero
                    for i in range(top):
                        acc += cs[i] * powers[i]._c[k]
                    coeffs.append(acc)
            blocks.append(PowerSeries(coeffs))
        result = blocks[-1]
        for b in reversed(blocks[:-1]):
            result = result * giant + b
        return result

    def __call__(self, inner):
        if isinstance(inner, PowerSeries):
            return self.compose(inner)
        return self.evaluate(inner)

    def revert(self) -> "PowerSeries":
        """Compositional inverse g with self(g(q)) = q, by Newton iteration."""
        c = self._c
        if self.order < 1:
            raise ValueError("reversion needs order >= 1")
        if c[0] != 0:
            raise ValueError("reversion needs a zero constant term")
        if c[1] == 0:
            raise ZeroDivisionError("reversion needs an invertible linear coefficient")
        one = _one_like(c[1])
        zero = one - one
        inv1 = one / c[1]
        n = self.order
        steps = []
        m = n
        while m > 1:
            steps.append(m)
            m = (m + 1) // 2
        g = PowerSeries([zero, inv1])
        fprime = self.derivative()
        for m in reversed(steps):
            gm = g.truncate(m)
            fg = self.truncate(m).compose(gm)
            dfg = fprime.truncate(m).compose(gm)
            resid = list(fg._c)
            resid[1] -= one
            g = gm - PowerSeries(resid) * dfg.reciprocal()
        return g.truncate(n)

    # -- exp / log -----------------------------------------------------
    def exp(self) -> "PowerSeries":
        """exp(self).  A nonzero constant term must be exponentiable by its
        scalar type (mpf yes, Fraction no)."""
        c = self._c
        c0 = c[0]
        if c0 != 0:
            if not _is_mpf(c0):
                raise ValueError("exp of a rational series needs a zero constant term")
            lead = c0.context.exp(c0)
        else:
            lead = _one_like(c0)
        n = self.order
        d = [k * c[k] for k in range(n + 1)]
        e = [lead]
        mpf = _is_mpf(c0)
        for k in range(1, n + 1):
            if mpf:
                s = c0.context.fdot(d[1 : k + 1], e[::-1])
            else:
                s = sum(d[i] * e[k - i] for i in range(1, k + 1))
            e.append(s / k)
        return PowerSeries(e)

    def log(self) -> "PowerSeries":
        """log(self) for a series with constant term 1."""
        if self._c[0] != 1:
            raise ValueError("log needs constant term 1")
        q = self.theta() * self.reciprocal()
        return q.integral_theta()

    # -- numerics --------------------------------------------------------
    def evaluate(self, x):
        """Horner evaluation of the truncated polynomial at ``x``."""
        acc = _zero_like(self._c[0] * x)
        for c in reversed(self._c):
            acc = acc * x + c
        return acc


def _one_like(x):
    if _is_mpf(x):
        return x.context.one
    if isinstance(x, (Fraction, int)):
        # int division must stay exact
        return Fraction(1)
    if isinstance(x, float):
        return 1.0
    return x**0


class InsufficientOrder(ArithmeticError):
    """Raised when a truncated series cannot be evaluated to the requested
    accuracy at a point."""


def eval_numeric(f: PowerSeries, x, tail_window: int = 10, rel_tol=None):
    """Evaluate ``f`` at real ``x`` with a geometric tail estimate.

    ``x`` is an mpf (its context sets the working precision).  The tail is
    bounded from the largest ratio ``|c[k+1] x| / |c[k]|`` among the last
    ``tail_window`` coefficients.  Returns ``(value, tail)``; raises
    :class:`InsufficientOrder` when the ratio reaches 1 (``x`` beyond the
    empirical radius) or the tail exceeds ``rel_tol`` (default 1e-10) times
    the value.
    """
    ctx = x.context
    cs = [c if _is_mpf(c) and c.context is ctx else _to_ctx(c, ctx) for c in f]
    value = ctx.zero
    for c in reversed(cs):
        value = value * x + c
    n = len(cs) - 1
    window = min(tail_window, n)
    ratio = ctx.zero
    ax = abs(x)
    for k in range(n - window, n):
        a, b = abs(cs[k]), abs(cs[k + 1])
        if a == 0:
            if b == 0:
                continue
            ratio = ctx.inf
            break
        ratio = max(ratio, b * ax / a)
    if ratio >= 1:
        raise InsufficientOrder(f"point {ctx.nstr(x, 8)} lies beyond the empirical radius of the series")
    last = abs(cs[n]) * ax**n
    tail = last * ratio / (1 - ratio) if ratio else last * 0
    tol = ctx.mpf("1e-10") if rel_tol is None else rel_tol
    if tail > tol * max(abs(value), ctx.mpf(10) ** (-ctx.dps)):
        raise InsufficientOrder(f"tail estimate {ctx.nstr(tail, 3)} too large; raise the truncation order")
    return value, tail


def _to_ctx(c, ctx):
    if isinstance(c, Fraction):
        return ctx.mpf(c.numerator) / c.denominator
    return ctx.mpf(c)


def lagrange_inversion(f: PowerSeries) -> PowerSeries:
    """Brute-force reversion, [q^n] g = (1/n) [z^(n-1)] (z/f)^n.

    Quadratic number of series products; reference implementation for tests.
    """
    n = f.order
    if f[0] != 0 or f[1] == 0:
        raise ValueError("lagrange_inversion needs f[0] = 0 and f[1] != 0")
    shifted = PowerSeries(f.coeffs[1:], n - 1)  # f/z
    phi = shifted.reciprocal()
    one = _one_like(f[1])
    out = [one - one]
    power = PowerSeries([one], n - 1)
    for k in range(1, n + 1):
        power = power * phi
        out.append(power[k - 1] / k)
    return PowerSeries(out)
