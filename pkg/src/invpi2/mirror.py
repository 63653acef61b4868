"""Mirror map, the potential T(q), the Yukawa coupling and numeric evaluation
of these quantities at real points.

All series are built exactly over Q from a Frobenius basis.  Numeric work
happens in two charts: the q-chart (T, theta T as series in q, z = z(q)) and
the z-chart (T, H2 as series in z, t = log|z| + H2(z)).  The q-chart
converges much further out and is preferred; the z-chart is a fallback.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cyode import FrobeniusBasis, ThetaOperator, frobenius_solve
from .numkernel import Real, context, to_mpf
from .series import InsufficientOrder, PowerSeries

#: truncation orders tried in turn when a tail estimate is too large
ORDER_LADDER = (50, 100, 200)


def b_series(F: FrobeniusBasis) -> list[PowerSeries]:
    """b_0 = theta a_0 and b_k = a_{k-1} + theta a_k."""
    a = F.a
    return [a[0].theta()] + [a[k - 1] + a[k].theta() for k in range(1, len(a))]


def h_functions(F: FrobeniusBasis):
    """(H0, H1, H2) as exact series in z.  H0 needs a fifth stratum; for a
    fourth-order basis it is returned as None."""
    a = F.a
    b = b_series(F)
    den = a[0] * b[1] - a[1] * b[0]
    if den[0] == 0:
        raise ZeroDivisionError("a0 b1 - a1 b0 has zero constant term")
    inv = den.reciprocal()

    def quot(k):
        return (a[0] * b[k] - a[k] * b[0]) * inv

    H2 = quot(2)
    H1 = quot(3) if len(a) > 3 else None
    H0 = quot(4) if len(a) > 4 else None
    return H0, H1, H2


def mirror_map(F: FrobeniusBasis):
    """(q(z), z(q)) with q = z exp(H2)."""
    _, _, H2 = h_functions(F)
    e = H2.exp()
    q_of_z = PowerSeries([H2.zero] + list(e.coeffs[:-1]))
    return q_of_z, q_of_z.revert()


def potential_T_z(F: FrobeniusBasis) -> PowerSeries:
    """T in the z-chart: H2^3/6 - H0 for a fifth-order basis; for a
    fourth-order basis the equivalent (beta3 - beta1 beta2 + beta1^3/3)/2 with
    beta_i = a_i/a_0."""
    if len(F) >= 5:
        H0, _, H2 = h_functions(F)
        return H2 * H2 * H2 * Fraction(1, 6) - H0
    inv = F.a[0].reciprocal()
    b1, b2, b3 = (F.a[i] * inv for i in (1, 2, 3))
    return (b3 - b1 * b2 + b1 * b1 * b1 * Fraction(1, 3)) * Fraction(1, 2)


def potential_T(F: FrobeniusBasis) -> PowerSeries:
    """T as a series in q."""
    _, z_of_q = mirror_map(F)
    return potential_T_z(F).compose(z_of_q)


def yukawa(T_q: PowerSeries) -> PowerSeries:
    """K = 1 - theta_q^3 T."""
    return 1 - T_q.theta().theta().theta()


def instanton_numbers(K_q: PowerSeries, d_max: int) -> list[Fraction]:
    """n_1..n_dmax from K = 1 + sum_d n_d d^3 q^d/(1 - q^d)."""
    if d_max > K_q.order:
        raise ValueError(f"d_max {d_max} exceeds the series order {K_q.order}")
    n = [Fraction(0)] * (d_max + 1)
    for m in range(1, d_max + 1):
        acc = Fraction(K_q[m])
        for d in range(1, m):
            if m % d == 0:
                acc -= n[d] * d**3
        n[m] = acc / m**3
    return n[1:]


def integrality_multiplier(values: Sequence[Fraction], bound: int = 10**6) -> int | None:
    """Smallest N0 <= bound with N0*v integral for all v, else None."""
    l = 1
    for v in values:
        d = Fraction(v).denominator
        l = l * d // math.gcd(l, d)
        if l > bound:
            return None
    return l


@dataclass(frozen=True)
class MirrorData:
    q_of_z: PowerSeries
    z_of_q: PowerSeries
    T_q: PowerSeries
    K_q: PowerSeries
    H0: PowerSeries | None
    H1: PowerSeries | None
    H2: PowerSeries
    T_z: PowerSeries
    operator: ThetaOperator | None = field(default=None, compare=False)

    @property
    def order(self) -> int:
        return self.T_q.order

    def at_order(self, N: int) -> "MirrorData":
        """The same data at truncation order N (needs the source operator)."""
        if N == self.order:
            return self
        if self.operator is None:
            raise InsufficientOrder("no source operator to rebuild the series at a higher order")
        return mirror_data(self.operator, N)


def mirror_data_from_basis(F: FrobeniusBasis, operator: ThetaOperator | None = None) -> MirrorData:
    if len(F) >= 5:
        H0, H1, H2 = h_functions(F)
    else:
        H0 = H1 = None
        _, _, H2 = h_functions(F)
    q_of_z, z_of_q = mirror_map(F)
    T_z = potential_T_z(F)
    T_q = T_z.compose(z_of_q)
    return MirrorData(q_of_z, z_of_q, T_q, yukawa(T_q), H0, H1, H2, T_z, operator)


@functools.lru_cache(maxsize=64)
def mirror_data(L: ThetaOperator, N: int) -> MirrorData:
    """Cached exact mirror data of the operator at order N."""
    return mirror_data_from_basis(frobenius_solve(L, N), L)


# -- numerics ---------------------------------------------------------------


@functools.lru_cache(maxsize=256)
def _mp_coeffs(series: PowerSeries, digits: int) -> tuple:
    ctx = context(digits)
    return tuple(to_mpf(c, ctx) for c in series)


def _horner(cs, x):
    acc = x.context.zero
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _tail(cs, x, window: int = 10):
    """Geometric tail bound of sum c_k x^k past the last coefficient."""
    ctx = x.context
    n = len(cs) - 1
    ratio = ctx.zero
    ax = abs(x)
    for k in range(max(0, n - window), n):
        a, b = abs(cs[k]), abs(cs[k + 1])
        if a == 0:
            if b == 0:
                continue
            return ctx.inf
        ratio = max(ratio, b * ax / a)
    if ratio >= 1:
        return ctx.inf
    return abs(cs[n]) * ax**n * ratio / (1 - ratio)


def radius_estimate(series: PowerSeries, window: int = 10) -> Fraction | None:
    """Empirical radius min |c_k/c_{k+1}| over the last ``window`` nonzero pairs."""
    n = series.order
    best = None
    for k in range(max(0, n - window), n):
        a, b = series[k], series[k + 1]
        if a and b:
            r = abs(Fraction(a) / Fraction(b))
            best = r if best is None else min(best, r)
    return best


@dataclass
class ChartPoint:
    """Everything the search equations need at one point."""

    t: object  # log|q|
    T: object
    thetaT: object  # theta_q T
    dt_dp: object
    z: object
    q: object
    error: object  # absolute error bound on T and theta T
    order: int
    chart: str


def potential_at(M: MirrorData, q):
    """(T(q), theta_q T(q), tail bound) from the q-series alone; usable at
    poles of z(q), where the chart evaluators give up."""
    D = q.context.dps
    T = _mp_coeffs(M.T_q, D)
    thT = _mp_coeffs(M.T_q.theta(), D)
    return _horner(T, q), _horner(thT, q), max(_tail(T, q), _tail(thT, q))


def eval_q_chart(M: MirrorData, t, u: int) -> ChartPoint:
    """Evaluate at q = u exp(t).  ``t`` is an mpf; its context sets precision."""
    ctx = t.context
    D = ctx.dps
    q = u * ctx.exp(t)
    T = _mp_coeffs(M.T_q, D)
    thT = _mp_coeffs(M.T_q.theta(), D)
    Z = _mp_coeffs(M.z_of_q, D)
    err = max(_tail(T, q), _tail(thT, q), _tail(Z, q) / max(abs(q), ctx.mpf(10) ** -D))
    return ChartPoint(t, _horner(T, q), _horner(thT, q), ctx.one, _horner(Z, q), q, err, M.order, "q")


def eval_z_chart(M: MirrorData, s, u: int) -> ChartPoint:
    """Evaluate at z = u exp(s); t = s + H2(z)."""
    ctx = s.context
    D = ctx.dps
    z = u * ctx.exp(s)
    H2 = _mp_coeffs(M.H2, D)
    thH2 = _mp_coeffs(M.H2.theta(), D)
    Tz = _mp_coeffs(M.T_z, D)
    thTz = _mp_coeffs(M.T_z.theta(), D)
    err = max(_tail(H2, z), _tail(thH2, z), _tail(Tz, z), _tail(thTz, z))
    h2 = _horner(H2, z)
    dt = 1 + _horner(thH2, z)
    t = s + h2
    q = u * ctx.exp(t)
    return ChartPoint(t, _horner(Tz, z), _horner(thTz, z) / dt, dt, z, q, err, M.order, "z")


class Evaluator:
    """Numeric access to a mirror family at fixed sign and precision, raising
    the truncation order along :data:`ORDER_LADDER` until the tail estimate
    drops below ``10^-(D+5)`` (or the ladder is exhausted)."""

    def __init__(self, M: MirrorData, u: int, D: int, ladder: Sequence[int] = ORDER_LADDER):
        if u not in (1, -1):
            raise ValueError("sign u must be +1 or -1")
        self.base = M
        self.u = u
        self.D = D
        self.ctx = context(D)
        self.ladder = [n for n in ladder if n >= M.order] or [M.order]
        self.tol = self.ctx.mpf(10) ** (-D - 5)

    def _levels(self):
        for N in self.ladder:
            try:
                yield self.base.at_order(N)
            except InsufficientOrder:
                yield self.base
                return

    def at(self, chart: str, p) -> ChartPoint:
        p = self.ctx.mpf(p)
        fn = eval_q_chart if chart == "q" else eval_z_chart
        best = None
        for M in self._levels():
            pt = fn(M, p, self.u)
            if best is None or pt.error < best.error:
                best = pt
            if pt.error < self.tol:
                return pt
        if best.error == self.ctx.inf:
            raise InsufficientOrder(f"{chart}-chart point {self.ctx.nstr(p, 10)} lies outside the series radius")
        return best

    def digits(self, pt: ChartPoint) -> int:
        """Decimal digits guaranteed by the tail estimate (capped at D)."""
        if pt.error == 0:
            return self.D
        return max(0, min(self.D, int(-self.ctx.log10(pt.error))))


def singular_point(M: MirrorData, D: int, u: int = 1, samples: int = 64):
    """Root of z'(q) on the real q-axis on the side of sign u.

    Scans (0, r) where r is the empirical radius of z(q) for a sign change of
    z'(q), refines by Newton and returns (q0, t0, z0) as Reals.
    """
    ctx = context(D + 10)
    dz = M.z_of_q.derivative()
    d1 = _mp_coeffs(dz, D + 10)
    d2 = _mp_coeffs(dz.derivative(), D + 10)
    Z = _mp_coeffs(M.z_of_q, D + 10)
    r = radius_estimate(M.z_of_q)
    r = ctx.one if r is None else to_mpf(r, ctx)
    prev_q, prev_v = None, None
    bracket = None
    for i in range(1, samples + 1):
        q = u * r * i / (samples + 1)
        v = _horner(d1, q)
        if prev_v is not None and (v > 0) != (prev_v > 0):
            bracket = (prev_q, q)
            break
        prev_q, prev_v = q, v
    if bracket is None:
        raise ArithmeticError("no sign change of z'(q) inside the series radius")
    q = (bracket[0] + bracket[1]) / 2
    for _ in range(200):
        step = _horner(d1, q) / _horner(d2, q)
        q -= step
        if abs(step) < abs(q) * ctx.mpf(10) ** (-D - 5):
            break
    else:
        raise ArithmeticError("Newton iteration for the singular point did not converge")
    err = _tail(d1, q)
    if err > ctx.mpf(10) ** (-D // 2):
        raise InsufficientOrder(f"tail estimate {ctx.nstr(err, 3)} at the singular point; raise the order")
    digits = D if err == 0 else max(1, min(D, int(-ctx.log10(err))))
    return Real(q, digits), Real(ctx.log(abs(q)), digits), Real(_horner(Z, q), digits)


def _refine_multiple_root(derivs, q, ctx, D):
    """Newton on the first derivative that does not vanish at a root of
    multiplicity m, i.e. on w^(m-1), which has a simple root there."""
    m = 1
    while m < len(derivs) - 1 and abs(_horner(derivs[m], q)) < ctx.mpf(10) ** (-D // 4) * max(1, abs(_horner(derivs[m + 1], q))):
        m += 1
    f, df = derivs[m - 1], derivs[m]
    for _ in range(200):
        step = _horner(f, q) / _horner(df, q)
        q -= step
        if abs(step) < abs(q) * ctx.mpf(10) ** (-D - 5):
            return q, m
    raise ArithmeticError("Newton iteration for a pole of z(q) did not converge")


def singular_pole(M: MirrorData, D: int, u: int = 1, samples: int = 512):
    """Real zero of q/z(q) on the side of sign u, i.e. a point where z(q)
    becomes infinite.  Multiple zeros (as for 1/j(q) at q = -exp(-pi sqrt 3))
    are refined through the derivative that has a simple zero there.

    Returns (q0, t0, multiplicity); raises ArithmeticError if none is found.
    """
    ctx = context(D + 10)
    w = PowerSeries(M.z_of_q.coeffs[1:]).reciprocal()
    derivs = [w]
    for _ in range(4):
        derivs.append(derivs[-1].derivative())
    cs = [_mp_coeffs(d, D + 10) for d in derivs]
    r = radius_estimate(w)
    r = ctx.one if r is None else min(ctx.one, to_mpf(r, ctx))
    # q/z(q) = 1 at the origin
    prev_q, prev_v = ctx.zero, ctx.one
    for i in range(1, samples + 1):
        q = u * r * i / (samples + 1)
        v = _horner(cs[0], q)
        if (v > 0) != (prev_v > 0):
            lo, hi = prev_q, q
            for _ in range(60):
                mid = (lo + hi) / 2
                if (_horner(cs[0], mid) > 0) == (prev_v > 0):
                    lo = mid
                else:
                    hi = mid
            q0, mult = _refine_multiple_root(cs, (lo + hi) / 2, ctx, D)
            err = _tail(cs[0], q0)
            if err > ctx.mpf(10) ** (-D // 2):
                raise InsufficientOrder(f"tail estimate {ctx.nstr(err, 3)} at the pole; raise the order")
            digits = D if err == 0 else max(1, min(D, int(-ctx.log10(err))))
            return Real(q0, digits), Real(ctx.log(abs(q0)), digits), mult
        prev_q, prev_v = q, v
    raise ArithmeticError("no real zero of q/z(q) inside the series radius")


def invert_mirror_map(M: MirrorData, z0, D: int) -> Real:
    """q with z(q) = z0, by Newton on the z(q) series starting from q = z0."""
    ctx = context(D + 10)
    Z = _mp_coeffs(M.z_of_q, D + 10)
    dZ = _mp_coeffs(M.z_of_q.derivative(), D + 10)
    target = to_mpf(z0, ctx)
    q = target
    for _ in range(200):
        step = (_horner(Z, q) - target) / _horner(dZ, q)
        q -= step
        if abs(step) <= abs(q) * ctx.mpf(10) ** (-D - 5):
            break
    else:
        raise ArithmeticError("mirror map inversion did not converge")
    err = _tail(Z, q)
    if err == ctx.inf:
        raise InsufficientOrder("inverted point lies outside the radius of z(q)")
    digits = D if err == 0 else max(1, min(D, int(-ctx.log10(err))))
    return Real(q, digits)
