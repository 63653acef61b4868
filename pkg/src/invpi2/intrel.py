"""Constant recognition: PSLQ integer relations, rational reconstruction and
quadratic surds.

The PSLQ routine works in binary fixed point on Python integers, so its
cost does not depend on any global floating-point state.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .numkernel import QuadExt, Real, context, mpf_to_fraction, squarefree_decomposition, to_mpf

GAMMA_SQ = Fraction(4, 3)  # gamma = sqrt(4/3)

#: default detection threshold is 10^-(D - DETECT_SLACK)
DETECT_SLACK = 15


def _digits_of(v) -> int:
    if isinstance(v, Real):
        return v.digits
    ctx = getattr(v, "context", None)
    return ctx.dps if ctx is not None else 15


def _isqrt_fixed(x: int, prec: int) -> int:
    from math import isqrt

    return isqrt(x << prec)


def pslq(v: Sequence, max_coeff: int = 10**6, D: int | None = None, tol=None, maxsteps: int | None = None):
    """Integer vector m != 0 with |sum m_i v_i| small and max|m_i| <= max_coeff.

    ``v`` holds Reals, mpfs, ints or Fractions.  ``D`` defaults to the
    smallest precision among the inputs; the detection threshold ``tol``
    defaults to 10^-(D-15) relative to max|v_i|.  Returns a tuple or None.
    """
    n = len(v)
    if n < 2:
        raise ValueError("pslq needs at least two values")
    if D is None:
        D = min(_digits_of(x) for x in v)
    ctx = context(D + 10)
    xs = [to_mpf(x, ctx) for x in v]
    scale = max(abs(x) for x in xs)
    if scale == 0:
        raise ValueError("all inputs are zero")
    xs = [x / scale for x in xs]
    if tol is None:
        tol = ctx.mpf(10) ** (-(D - DETECT_SLACK))
    else:
        tol = to_mpf(tol, ctx)
    if maxsteps is None:
        maxsteps = 10 * D
    prec = int(ctx.prec)
    one = 1 << prec
    x = [int(ctx.nint(xi * one)) for xi in xs]
    itol = int(tol * one)
    for i, xi in enumerate(x):
        if abs(xi) <= itol:
            rel = tuple(1 if j == i else 0 for j in range(n))
            return rel

    def fdiv(a, b):
        return (a << prec) // b

    def fmul(a, b):
        return (a * b) >> prec

    def rnd(a, b):
        # nearest integer to a/b for fixed-point a, b
        return ((a << 1) + b) // (b << 1)

    # partial sums s_k = sqrt(sum_{j>=k} x_j^2)
    s = [0] * n
    acc = 0
    for k in range(n - 1, -1, -1):
        acc += x[k] * x[k]
        s[k] = _isqrt_fixed(acc >> prec, prec)
    t = s[0]
    y = [fdiv(xi, t) for xi in x]
    s = [fdiv(sk, t) for sk in s]
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    B = [[int(i == j) for j in range(n)] for i in range(n)]
    H = [[0] * (n - 1) for _ in range(n)]
    for i in range(n):
        for j in range(n - 1):
            if i < j:
                H[i][j] = 0
            elif i == j:
                H[i][j] = fdiv(s[j + 1], s[j]) if s[j] else 0
            else:
                den = fmul(s[j], s[j + 1])
                H[i][j] = -fdiv(fmul(y[i], y[j]), den) if den else 0

    def reduce_row(i, jmax):
        for j in range(jmax, -1, -1):
            if not H[j][j]:
                continue
            q = rnd(H[i][j], H[j][j])
            if q:
                y[j] += q * y[i]
                for k in range(j + 1):
                    H[i][k] -= q * H[j][k]
                for k in range(n):
                    A[i][k] -= q * A[j][k]
                    B[k][j] += q * B[k][i]

    for i in range(1, n):
        reduce_row(i, i - 1)

    gamma_pows = []
    g = 1.0
    gam = float(GAMMA_SQ) ** 0.5
    for i in range(n):
        g *= gam
        gamma_pows.append(g)

    for _ in range(maxsteps):
        # exchange step
        best, m = -1.0, 0
        for i in range(n - 1):
            val = gamma_pows[i] * abs(H[i][i]) / one
            if val > best:
                best, m = val, i
        y[m], y[m + 1] = y[m + 1], y[m]
        H[m], H[m + 1] = H[m + 1], H[m]
        A[m], A[m + 1] = A[m + 1], A[m]
        for row in B:
            row[m], row[m + 1] = row[m + 1], row[m]
        if m < n - 2:
            t0 = _isqrt_fixed((H[m][m] * H[m][m] + H[m][m + 1] * H[m][m + 1]) >> prec, prec)
            if not t0:
                break
            t1 = fdiv(H[m][m], t0)
            t2 = fdiv(H[m][m + 1], t0)
            for i in range(m, n):
                t3, t4 = H[i][m], H[i][m + 1]
                H[i][m] = fmul(t1, t3) + fmul(t2, t4)
                H[i][m + 1] = -fmul(t2, t3) + fmul(t1, t4)
        for i in range(m + 1, n):
            reduce_row(i, min(i - 1, m + 1))
        # look for a relation
        for i in range(n):
            if abs(y[i]) <= itol:
                rel = [B[j][i] for j in range(n)]
                if max(abs(c) for c in rel) <= max_coeff and _residual_ok(rel, xs, ctx, tol):
                    return _normalize(rel)
        # every relation m has Euclidean norm >= 1/max|H_jj|
        hmax = max(abs(H[j][j]) for j in range(n - 1))
        if hmax and Fraction(one, hmax) ** 2 > n * max_coeff**2:
            return None
    return None


def _residual_ok(rel, xs, ctx, tol) -> bool:
    r = ctx.fsum(c * x for c, x in zip(rel, xs))
    return abs(r) <= tol


def _normalize(rel):
    for c in rel:
        if c:
            return tuple(rel) if c > 0 else tuple(-d for d in rel)
    return tuple(rel)


def rationalize(x, max_denom: int = 10**12, tol=None) -> Fraction | None:
    """Best rational approximation p/q with q <= max_denom that agrees with x
    to within 10^-(D-10) (relative to max(1, |x|)), else None."""
    D = _digits_of(x)
    ctx = context(D + 10)
    xv = to_mpf(x, ctx)
    if tol is None:
        tol = ctx.mpf(10) ** (-(D - 10))
    if not ctx.isfinite(xv):
        return None
    cand = mpf_to_fraction(xv).limit_denominator(max_denom)
    if abs(xv - to_mpf(cand, ctx)) <= tol * max(1, abs(xv)):
        return cand
    return None


def identify_quadratic(x, discs: Sequence[int] = (2, 3, 5, 6, 7), height: int = 10**6) -> QuadExt | None:
    """Find x = (a + b sqrt(d))/c with small height for some d in ``discs``."""
    D = _digits_of(x)
    r = rationalize(x, max_denom=height)
    if r is not None:
        return QuadExt(r)
    ctx = context(D + 10)
    xv = to_mpf(x, ctx)
    for d in discs:
        m, sf = squarefree_decomposition(d)
        if sf == 1:
            continue
        rel = pslq([ctx.one, ctx.sqrt(sf), xv], max_coeff=height, D=D)
        if rel is None or rel[2] == 0:
            continue
        a, b, c = rel
        return QuadExt(Fraction(-a, c), Fraction(-b, c), sf)
    return None
