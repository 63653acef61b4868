"""Search for series of the form sum A_n (a + b n + c n^2) z^n = 1/pi^2.

For a rational k the search equation

    t^3/6 - (pi^2/2)(k + e) t - h zeta(3) - T(q) = 0,   q = u exp(t)

is solved for t; j then follows from t and theta_q T, and when j is a small
rational the point z = z(q) is identified and a, b, c are recovered by PSLQ.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cyode import CaseSpec, ThetaOperator, hypergeometric_operator, singular_radius
from .intrel import identify_quadratic, pslq, rationalize
from .mirror import ChartPoint, Evaluator, MirrorData, mirror_data, potential_at, singular_point, singular_pole
from .numkernel import (
    QuadExt,
    Real,
    const_pi,
    const_zeta3,
    context,
    hurwitz_zeta3,
    quad_sqrt,
    squarefree_decomposition,
    to_mpf,
    trig_at_rational,
)
from .series import InsufficientOrder, PowerSeries
from .verifier import FormulaRecord, verify_formula, weighted_sum

WORKERS_ENV = "INVPI2_WORKERS"
J_TOL = 1e-10
J_MAX_DEN = 12
DEFAULT_DISCS = (1, 2, 3, 5, 6, 7, 10, 11, 13, 15)
#: |z| * growth within this of 1 counts as the boundary of convergence
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class Invariants:
    e: Fraction
    h: Fraction
    f: Fraction

    def __iter__(self):
        return iter((self.e, self.h, self.f))


@dataclass
class HuntCandidate:
    case: str
    k: Fraction
    u: int
    t: Real | None = None
    q: Real | None = None
    j_value: Real | None = None
    j: Fraction | None = None
    z: Fraction | QuadExt | None = None
    tau2: Fraction | None = None
    a: Fraction | QuadExt | None = None
    b: Fraction | QuadExt | None = None
    c: Fraction | QuadExt | None = None
    verified_digits: int = 0
    flags: list = field(default_factory=list)
    status: str = "candidate"
    note: str = ""

    def sort_key(self):
        return (self.k, self.u, float(self.t.value) if self.t is not None else 0.0)


# -- invariants ----------------------------------------------------------------


def invariants_hypergeometric(case: CaseSpec, D: int = 60) -> Invariants:
    """e, h, f from the closed forms in s1, s2, each recognized as a rational.

    h = [zeta(3,1/2) + zeta(3,s1) + zeta(3,1-s1) + zeta(3,s2) + zeta(3,1-s2) - 5 zeta(3)] / (3 zeta(3)).
    """
    s1, s2 = case.s1, case.s2
    cot1, cot2 = trig_at_rational("cot", s1, D), trig_at_rational("cot", s2, D)
    sin1, sin2 = trig_at_rational("sin", s1, D), trig_at_rational("sin", s2, D)
    e = Fraction(5, 3) + cot1 * cot1 + cot2 * cot2
    f = 1 / (sin1 * sin1 * sin2 * sin2)
    z3 = const_zeta3(D)
    hz = sum(
        (hurwitz_zeta3(s, D) for s in (Fraction(1, 2), s1, 1 - s1, s2, 1 - s2)),
        Real(context(D).zero, D),
    )
    h = (hz - 5 * z3) / (3 * z3)
    out = []
    for name, x in (("e", e), ("h", h), ("f", f)):
        r = rationalize(x, max_denom=10**6)
        if r is None:
            raise ArithmeticError(f"could not recognize {name} = {x} as a rational")
        out.append(r)
    return Invariants(*out)


def _invariants_at(M: MirrorData, q0: Real, t0: Real, D: int) -> Invariants | None:
    digits = min(q0.digits, D)
    ctx = context(digits + 10)
    T, thT, err = potential_at(M, ctx.mpf(q0.value))
    if err:
        digits = min(digits, int(-ctx.log10(err))) if ctx.isfinite(err) else 0
    if digits < 20:
        return None
    t = ctx.mpf(t0.value)
    pi2 = ctx.pi**2
    v = [t**3 / 6 - T, pi2 * t / 2, ctx.zeta(3)]
    rel = pslq([Real(x, digits) for x in v], max_coeff=10**6, D=digits)
    if rel is None or rel[0] == 0:
        return None
    e = Fraction(-rel[1], rel[0])
    h = Fraction(-rel[2], rel[0])
    fv = (t**2 / 2 - thT - pi2 * to_mpf(e, ctx) / 2) ** 2 / pi2**2
    f = rationalize(Real(fv, digits), max_denom=10**4)
    return None if f is None else Invariants(e, h, f)


def singular_candidates(M: MirrorData, D: int = 40, u: int | None = None) -> list:
    """Real singular points as (kind, q0, t0) with kind "pole" (z infinite)
    or "critical" (dz/dq = 0); poles first, then u = +1 before u = -1."""
    signs = (1, -1) if u is None else (u,)
    out = []
    for kind, finder in (("pole", singular_pole), ("critical", singular_point)):
        for s in signs:
            try:
                q0, t0, _ = finder(M, D, s)
            except (ArithmeticError, InsufficientOrder):
                continue
            out.append((kind, q0, t0))
    return out


def invariants_from_singularity(M: MirrorData, D: int = 40, u: int | None = None) -> Invariants:
    """e, h, f from the singular solution k = j = 0.

    At the singular point q0, with t0 = log|q0|, PSLQ on
    [t0^3/6 - T(q0), pi^2 t0/2, zeta(3)] gives (1, -e, -h) up to scale and
    f = (t0^2/2 - theta T(q0) - pi^2 e/2)^2 / pi^4.  Candidates are the real
    poles of z(q) (no series can exist where z is infinite) and then the
    zeros of dz/dq; the first one giving a relation wins.
    """
    for kind, q0, t0 in singular_candidates(M, D, u):
        try:
            inv = _invariants_at(M, q0, t0, D)
        except InsufficientOrder:
            continue
        if inv is not None:
            return inv
    raise ArithmeticError("no singular point gives an integer relation")


# -- the search equations ----------------------------------------------------


def _cubic_seeds(inv: Invariants, k: Fraction, ctx) -> list:
    """Real negative roots of t^3/6 - (pi^2/2)(k+e) t - h zeta(3)."""
    a = ctx.pi**2 / 2 * to_mpf(k + inv.e, ctx)
    b = to_mpf(inv.h, ctx) * ctx.zeta(3)
    roots = ctx.polyroots([ctx.mpf(1) / 6, 0, -a, -b], maxsteps=200, extraprec=50)
    out = []
    for r in roots:
        if abs(ctx.im(r)) < ctx.mpf(10) ** (-ctx.dps // 2) and ctx.re(r) < 0:
            out.append(ctx.re(r))
    return sorted(out)


def _F(inv, k, pt: ChartPoint, pi2, z3):
    ctx = pt.t.context
    kk = to_mpf(k + inv.e, ctx)
    return pt.t**3 / 6 - pi2 / 2 * kk * pt.t - to_mpf(inv.h, ctx) * z3 - pt.T


def _newton(ev: Evaluator, chart: str, p0, inv, k, maxit: int = 80):
    ctx = ev.ctx
    pi2 = ctx.pi**2
    z3 = ctx.zeta(3)
    kk = to_mpf(k + inv.e, ctx)
    p = ctx.mpf(p0)
    tol = ctx.mpf(10) ** (-ev.D + 10)
    small = 0
    for _ in range(maxit):
        pt = ev.at(chart, p)
        F = _F(inv, k, pt, pi2, z3)
        dF = (pt.t**2 / 2 - pi2 / 2 * kk - pt.thetaT) * pt.dt_dp
        if dF == 0 or not ctx.isfinite(F):
            return None
        step = F / dF
        # damp wild steps that would leave the series domain
        if abs(step) > 2:
            step = 2 * ctx.sign(step)
        p -= step
        # the attainable accuracy is limited by the series tail
        floor = max(tol, 100 * pt.error / abs(dF))
        if abs(step) < floor * max(1, abs(p)):
            small += 1
            if small >= 2:
                pt = ev.at(chart, p)
                F = _F(inv, k, pt, pi2, z3)
                if abs(F) < max(tol, 1000 * pt.error) * max(1, abs(pt.t) ** 3):
                    return pt
                return None
    return None


def solve_eq6_all(inv: Invariants, k, u: int, M: MirrorData, D: int = 60, ladder=None) -> list[ChartPoint]:
    """All distinct roots reachable from the cubic seeds and a scan of
    t in [-40, -1]; q-chart first, z-chart as fallback."""
    if D < 40:
        raise ValueError("solve_eq6 needs at least 40 digits")
    k = Fraction(k)
    ev = Evaluator(M, u, D, ladder) if ladder else Evaluator(M, u, D)
    ctx = ev.ctx
    seeds = _cubic_seeds(inv, k, ctx) + [ctx.mpf(-x) for x in range(1, 41, 3)]
    found: list[ChartPoint] = []
    coarse = 0
    for s in seeds:
        for chart in ("q", "z"):
            try:
                pt = _newton(ev, chart, s, inv, k)
            except (InsufficientOrder, ZeroDivisionError, OverflowError):
                pt = None
            if pt is None or not ctx.isfinite(pt.t) or pt.t >= 0:
                continue
            if ev.digits(pt) < D - 10:
                coarse += 1
                continue
            if all(abs(pt.t - o.t) > ctx.mpf(10) ** (-D // 2) for o in found):
                found.append(pt)
            break
    if not found and coarse:
        raise InsufficientOrder("roots found only to low accuracy; raise the truncation order")
    return sorted(found, key=lambda p: p.t)


def solve_eq6(inv: Invariants, k, u: int, M: MirrorData, D: int = 60, ladder=None) -> ChartPoint | None:
    """The root of the search equation with the smallest |q| (None if no
    root lies inside the series radius)."""
    roots = solve_eq6_all(inv, k, u, M, D, ladder)
    return roots[0] if roots else None


def compute_j(inv: Invariants, k, pt: ChartPoint) -> Real:
    """j = 12 {(t^2/2 - theta T - (pi^2/2)(k+e))^2/pi^4 - k^2/4 - ek - f}."""
    ctx = pt.t.context
    k = Fraction(k)
    pi2 = ctx.pi**2
    inner = pt.t**2 / 2 - pt.thetaT - pi2 / 2 * to_mpf(k + inv.e, ctx)
    rest = to_mpf(k * k / 4 + inv.e * k + inv.f, ctx)
    return Real(12 * (inner**2 / pi2**2 - rest), ctx.dps)


def recognize_j(j, max_den: int = J_MAX_DEN, tol: float = J_TOL) -> Fraction | None:
    """The rational p/q with the smallest q <= max_den within ``tol`` of j."""
    x = j.value if isinstance(j, Real) else j
    ctx = context(30)
    x = to_mpf(x, ctx)
    if not ctx.isfinite(x):
        return None
    for q in range(1, max_den + 1):
        p = int(ctx.nint(x * q))
        if abs(x - ctx.mpf(p) / q) < tol:
            return Fraction(p, q)
    return None


def tau_squared(inv: Invariants, k, j) -> Fraction:
    k, j = Fraction(k), Fraction(j)
    return j / 12 + k * k / 4 + inv.e * k + inv.f


def compute_tau_hypergeometric(c, rho, z, D: int = 50) -> Real:
    """tau = c / sqrt(1 - rho z)."""
    ctx = context(D)
    w = 1 - to_mpf(rho, ctx) * to_mpf(z, ctx)
    if w <= 0:
        raise ValueError("1 - rho z must be positive")
    return Real(to_mpf(c, ctx) / ctx.sqrt(w), D)


def c_from_tau2(tau2, rho, z) -> QuadExt | None:
    """c = tau sqrt(1 - rho z) exactly, when it lies in a quadratic field."""
    w = QuadExt.coerce(1) - QuadExt.coerce(rho) * QuadExt.coerce(z)
    if float(w) <= 0:
        raise ValueError("1 - rho z must be positive")
    return quad_sqrt(QuadExt.coerce(tau2) * w)


def compute_tau_general(e3: PowerSeries, z, c, D: int = 50) -> Real:
    """tau = c exp(int e3(z)/(2z) dz) for a user-supplied series e3 with e3(0) = 0."""
    if e3[0] != 0:
        raise ValueError("e3 must vanish at z = 0")
    ctx = context(D)
    g = e3.integral_theta()
    zv = to_mpf(z, ctx)
    acc = ctx.zero
    for coef in reversed(g.coeffs):
        acc = acc * zv + to_mpf(coef, ctx)
    return Real(to_mpf(c, ctx) * ctx.exp(acc / 2), D)


# -- coefficient recovery -------------------------------------------------------


def _as_exact(x):
    q = QuadExt.coerce(x)
    return q.rat if q.is_rational else q


def recover_abc(seq, z, D: int = 60, discs: Sequence[int] = DEFAULT_DISCS, max_coeff: int | None = None):
    """(a, b, c) with sum A_n (a + bn + cn^2) z^n = 1/pi^2, by PSLQ.

    Rational z: relation among [S0, S1, S2, sqrt(d)/pi^2] for d in ``discs``.
    Quadratic z in Q(sqrt d): relation among S_m, sqrt(d) S_m, 1/pi^2 and
    sqrt(d)/pi^2.  Returns None when no relation is found.
    """
    if max_coeff is None:
        # four or eight unknowns need roughly 4 log10(max_coeff) digits
        max_coeff = 10 ** max(6, (D - 20) // 4)
    ctx = context(D + 10)
    S = [weighted_sum(seq, z, (0,) * m + (1,) + (0,) * (2 - m), D + 5).value for m in range(3)]
    pi2 = ctx.pi**2
    zq = QuadExt.coerce(z)
    if zq.is_rational:
        for d in discs:
            _, sf = squarefree_decomposition(d)
            r = ctx.sqrt(sf)
            rel = pslq([Real(x, D) for x in S + [r / pi2]], max_coeff=max_coeff, D=D)
            if rel is None or rel[3] == 0:
                continue
            # sum_m rel[m] S_m = -rel[3] sqrt(d)/pi^2, so divide by -rel[3] sqrt(d)
            scale = QuadExt(0, Fraction(-rel[3]), sf)
            return tuple(_as_exact(QuadExt(rel[m]) / scale) for m in range(3))
        return None
    sd = zq.disc
    r = ctx.sqrt(sd)
    vec = []
    for x in S:
        vec += [x, r * x]
    vec += [1 / pi2, r / pi2]
    rel = pslq([Real(x, D) for x in vec], max_coeff=max_coeff, D=D)
    if rel is None:
        return None
    rhs = -QuadExt(rel[6], rel[7], sd)
    if rhs == QuadExt(0):
        return None
    return tuple(_as_exact(QuadExt(rel[2 * m], rel[2 * m + 1], sd) / rhs) for m in range(3))


# -- identification and the grid sweep ---------------------------------------


def identify_z(zv: Real, discs: Sequence[int] = (2, 3, 5, 6, 7)):
    """Rational (small height) or quadratic-surd form of a numeric z."""
    max_den = 10 ** max(6, min(30, zv.digits // 3))
    r = rationalize(zv, max_denom=max_den)
    if r is not None:
        return r
    return identify_quadratic(zv, discs, height=10**8)


@dataclass
class HuntSource:
    """What grid_hunt needs about a family: its id, operator, invariants,
    A_n expression and (for hypergeometric cases) rho."""

    id: str
    operator: ThetaOperator
    invariants: Invariants
    seq: str | None = None
    rho: Fraction | None = None

    @classmethod
    def from_case(cls, case: CaseSpec, D: int = 60) -> "HuntSource":
        return cls(case.id, hypergeometric_operator(case), invariants_hypergeometric(case, D), case.binomial_form, case.rho)


def growth_rate(src: HuntSource) -> float:
    """1/radius of sum A_n z^n: rho for hypergeometric cases, otherwise read
    off the leading polynomial of the operator."""
    if src.rho is not None:
        return float(src.rho)
    r = singular_radius(src.operator)
    return 0.0 if r is None else float(1 / r)


def _disc_candidates(tau2: Fraction, extra: Sequence[int] = DEFAULT_DISCS) -> tuple:
    """Squarefree part of tau^2 first (c/tau is usually rational), then the defaults."""
    _, sf = squarefree_decomposition(tau2.numerator * tau2.denominator)
    return (sf,) + tuple(d for d in extra if d != sf)


def hunt_one(src: HuntSource, k, u: int, D: int = 60, order: int = 100, recover: bool = True) -> HuntCandidate:
    """Solve, compute and recognize j, then identify z, tau^2 and (a, b, c)."""
    k = Fraction(k)
    cand = HuntCandidate(src.id, k, u)
    M = mirror_data(src.operator, order)
    ladder = [n for n in (order, 2 * order) if n <= max(order, 200)]
    try:
        pt = solve_eq6(src.invariants, k, u, M, D, ladder)
    except InsufficientOrder as exc:
        cand.status, cand.note = "failed", str(exc)
        return cand
    if pt is None:
        cand.status, cand.note = "failed", "no root inside the series radius"
        return cand
    ev = Evaluator(M, u, D, ladder)
    digits = max(1, ev.digits(pt))
    cand.t = Real(pt.t, digits)
    cand.q = Real(pt.q, digits)
    jv = compute_j(src.invariants, k, pt)
    cand.j_value = Real(jv.value, digits)
    j = recognize_j(jv)
    if j is None:
        cand.status, cand.note = "rejected", "j is not a small-denominator rational"
        return cand
    cand.j = j
    cand.tau2 = tau_squared(src.invariants, k, j)
    z = identify_z(Real(pt.z, digits))
    if z is None:
        cand.status, cand.note = "unrecognized", "z not identified"
        return cand
    cand.z = z
    ratio = abs(float(z)) * growth_rate(src)
    if k == 0 and j == 0:
        cand.flags.append("singular")
        cand.status = "singular"
        cand.a = cand.b = cand.c = Fraction(0)
        return cand
    if ratio > 1 + BOUNDARY_TOL:
        cand.flags.append("divergent-side")
        cand.status = "divergent"
        # c still follows from tau; a and b would need the analytic continuation
        if src.rho is not None and QuadExt.coerce(z).is_rational and 1 - src.rho * Fraction(z) > 0:
            c = c_from_tau2(cand.tau2, src.rho, z)
            cand.c = None if c is None else _as_exact(c)
        return cand
    if ratio > 0.5:
        cand.flags.append("slow")
    if not recover or src.seq is None:
        return cand
    c_tau = None
    discs = _disc_candidates(cand.tau2)
    if src.rho is not None and QuadExt.coerce(z).is_rational:
        c_tau = c_from_tau2(cand.tau2, src.rho, z)
        if c_tau is not None:
            discs = (c_tau.disc,) + tuple(d for d in discs if d != c_tau.disc)
    try:
        abc = recover_abc(src.seq, z, min(D, digits), discs)
    except (InsufficientOrder, ArithmeticError) as exc:
        cand.note = f"coefficient recovery failed: {exc}"
        return cand
    if abc is None:
        cand.note = "no PSLQ relation for a, b, c"
        return cand
    cand.a, cand.b, cand.c = abc
    if c_tau is not None and QuadExt.coerce(cand.c) != c_tau:
        cand.flags.append("tau-mismatch")
    rec = FormulaRecord(src.seq, z, cand.a, cand.b, cand.c, Fraction(1), provenance="hunt")
    try:
        cand.verified_digits = verify_formula(rec, min(D, digits))
    except (InsufficientOrder, ArithmeticError) as exc:
        cand.note = f"verification failed: {exc}"
    confirmed = cand.verified_digits >= 40 and "slow" not in cand.flags and "tau-mismatch" not in cand.flags
    cand.status = "confirmed" if confirmed else "unverified"
    return cand


def parse_k_grid(spec: str) -> list[Fraction]:
    """``i/60:0..1200`` means k = i/60 for i = 0..1200; a plain list
    ``1,5/3,8/3`` is also accepted; empty text gives an empty grid."""
    spec = spec.strip()
    if not spec:
        return []
    if ":" in spec:
        head, rng = spec.split(":", 1)
        if not head.startswith("i/"):
            raise ValueError(f"grid head must look like i/<den>, got {head!r}")
        try:
            den = int(head[2:])
            lo, hi = (int(x) for x in rng.split(".."))
        except ValueError:
            raise ValueError(f"bad k-grid {spec!r}; expected i/<den>:<lo>..<hi>") from None
        if den <= 0:
            raise ValueError("k-grid denominator must be positive")
        return [Fraction(i, den) for i in range(lo, hi + 1)]
    return [Fraction(x) for x in spec.split(",") if x.strip()]


def worker_count() -> int:
    env = os.environ.get(WORKERS_ENV)
    cpus = os.cpu_count() or 1
    if env:
        return max(1, min(int(env), cpus))
    return cpus


def _hunt_task(args):
    src, k, u, D, order, recover = args
    return hunt_one(src, k, u, D, order, recover)


def grid_hunt(src: HuntSource, ks: Iterable, u: int, D: int = 60, order: int = 100, recover: bool = True, workers: int | None = None, keep_all: bool = False) -> list[HuntCandidate]:
    """Sweep k over ``ks``; keep candidates with rational j (all if keep_all).
    Results are sorted by k whatever the worker count."""
    tasks = [(src, Fraction(k), u, D, order, recover) for k in ks]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_hunt_task, tasks))
    else:
        results = [_hunt_task(t) for t in tasks]
    if not keep_all:
        results = [r for r in results if r.j is not None]
    return sorted(results, key=HuntCandidate.sort_key)
