"""Command-line driver.

    invpi2 frobenius CASE [--order N]
    invpi2 invariants CASE [--digits D] [--order N]
    invpi2 hunt CASE [--k-grid SPEC] [--sign +|-] [--digits D] [--order N] [--out FILE]
    invpi2 verify FILE [--digits D]
    invpi2 congruence FILE [--primes LO..HI] [--mod-exp M]

CASE is a built-in id (t1..t14), a bundled operator-defined id (a_alpha,
b_theta, ...), or a path to a ``.op`` operator file or ``.json`` case file.
FILE may name a bundled data file (formulas.json, congruences.json).

Exit codes: 0 success, 2 usage, 3 numeric failure (precision or tail),
4 recognition failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .cyode import CaseSpec, frobenius_solve, hypergeometric_operator
from .registry import UserCase, _data_path, resolve_case
from .seqlang import SeqError
from .series import InsufficientOrder
from .store import ResultStore, load_records

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_RECOGNITION = 0, 2, 3, 4

DEFAULT_DIGITS = 50
DEFAULT_ORDER = 50
DEFAULT_GRID = "i/3:0..60"


class UsageError(Exception):
    pass


class RecognitionError(Exception):
    pass


def _fmt(x) -> str:
    return "-" if x is None else str(x)


def _case(name: str):
    try:
        return resolve_case(name)
    except (KeyError, FileNotFoundError) as exc:
        raise UsageError(exc.args[0] if exc.args else str(exc)) from None


def _operator(case):
    return hypergeometric_operator(case) if isinstance(case, CaseSpec) else case.operator


def _data_file(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    bundled = Path(str(_data_path(name)))
    if bundled.exists():
        return bundled
    raise UsageError(f"no such file: {name}")


def _parse_range(text: str) -> range:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise UsageError(f"expected LO..HI, got {text!r}") from None
    return range(lo, hi + 1)


def _parse_invariants(text: str):
    from .hunter import Invariants

    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError("--invariants takes e,h,f")
    return Invariants(*(Fraction(x) for x in parts))


# -- commands ----------------------------------------------------------------


def cmd_frobenius(args, out) -> int:
    case = _case(args.case)
    if args.order < 0:
        raise UsageError("order must be nonnegative")
    basis = frobenius_solve(_operator(case), args.order)
    for i, a in enumerate(basis):
        out.write(f"a{i}: " + " ".join(str(c) for c in a.coeffs) + "\n")
    return EXIT_OK


def _invariants_for(case, D: int, order: int, computed: bool = False):
    from .hunter import Invariants, invariants_from_singularity, invariants_hypergeometric
    from .mirror import mirror_data

    if isinstance(case, CaseSpec):
        return invariants_hypergeometric(case, D), "closed forms"
    if case.invariants is not None and not computed:
        return Invariants(*case.invariants), "table values"
    M = mirror_data(case.operator, order)
    return invariants_from_singularity(M, min(D, 40)), "singular point"


def cmd_invariants(args, out) -> int:
    case = _case(args.case)
    try:
        inv, how = _invariants_for(case, args.digits, args.order, computed=True)
    except ArithmeticError as exc:
        raise RecognitionError(str(exc)) from None
    out.write(f"e = {inv.e}\nh = {inv.h}\nf = {inv.f}\n# via {how}\n")
    if isinstance(case, UserCase) and case.invariants is not None and tuple(inv) != case.invariants:
        stored = ", ".join(str(x) for x in case.invariants)
        out.write(f"# differs from the stored values ({stored})\n")
    return EXIT_OK


def _hunt_source(case, args):
    from dataclasses import replace

    from .hunter import HuntSource
    from .seqlang import parse

    if args.seq:
        parse(args.seq)  # fail early with a usage error
    if isinstance(case, CaseSpec):
        src = HuntSource.from_case(case, max(args.digits, 60))
        return replace(src, seq=args.seq) if args.seq else src
    seq = args.seq or case.seq
    if args.invariants:
        inv = _parse_invariants(args.invariants)
    else:
        try:
            inv, _ = _invariants_for(case, args.digits, args.order)
        except ArithmeticError as exc:
            raise RecognitionError(f"{exc}; pass --invariants e,h,f") from None
    return HuntSource(case.id, case.operator, inv, seq)


def cmd_hunt(args, out) -> int:
    from .hunter import grid_hunt, parse_k_grid

    case = _case(args.case)
    try:
        ks = parse_k_grid(args.k_grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not ks:
        return EXIT_OK
    u = 1 if args.sign == "+" else -1
    src = _hunt_source(case, args)
    found = grid_hunt(src, ks, u, args.digits, args.order, workers=args.workers, keep_all=args.all)
    for c in found:
        out.write(
            f"{c.case} k={c.k} u={'+' if c.u > 0 else '-'} j={_fmt(c.j)} z={_fmt(c.z)} tau2={_fmt(c.tau2)} "
            f"a={_fmt(c.a)} b={_fmt(c.b)} c={_fmt(c.c)} digits={c.verified_digits} status={c.status}"
            + (f" flags={','.join(c.flags)}" if c.flags else "")
            + (f" # {c.note}" if c.note else "")
            + "\n"
        )
    if args.out and found:
        ResultStore(args.out).append(found)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from .verifier import FormulaRecord, partial_digits, verify_formula

    records = [r for r in load_records(_data_file(args.file)) if isinstance(r, FormulaRecord)]
    if args.name:
        records = [r for r in records if r.name in args.name]
        if not records:
            raise UsageError("no record with that name")
    worst = EXIT_OK
    need = min(args.digits, args.min_digits)
    results = []
    for rec in records:
        label = rec.name or rec.seq
        if rec.slow:
            # too slow to certify: report a partial-sum check and never confirm
            d = partial_digits(rec, args.partial_terms, min(args.digits, 30))
            out.write(f"{label}: unverified, partial sum of {args.partial_terms} terms matches {d} digits\n")
            results.append(FormulaRecord(**{**rec.__dict__, "status": "unverified", "notes": f"partial {d} digits"}))
            continue
        try:
            d = verify_formula(rec, args.digits)
        except InsufficientOrder as exc:
            out.write(f"{label}: numeric failure: {exc}\n")
            worst = max(worst, EXIT_NUMERIC)
            continue
        except ArithmeticError as exc:
            out.write(f"{label}: {exc}\n")
            worst = max(worst, EXIT_NUMERIC)
            continue
        ok = d >= need
        out.write(f"{label}: verified {d} digits\n" if ok else f"{label}: FAILED, only {d} digits agree\n")
        results.append(FormulaRecord(**{**rec.__dict__, "status": "confirmed" if ok else "failed"}))
        if not ok:
            worst = max(worst, EXIT_RECOGNITION)
    if args.out:
        ResultStore(args.out).append(results)
    return worst


def cmd_congruence(args, out) -> int:
    from .verifier import CongruenceReport, CongruenceSpec, congruence_residue

    specs = [r for r in load_records(_data_file(args.file)) if isinstance(r, CongruenceSpec)]
    if args.name:
        specs = [s for s in specs if s.name in args.name]
        if not specs:
            raise UsageError("no congruence with that name")
    primes = [p for p in _parse_range(args.primes) if _is_prime(p)]
    worst = EXIT_OK
    reports = []
    for spec in specs:
        m = args.mod_exp if args.mod_exp is not None else spec.m
        for p in primes:
            if p < 3 or not spec.applies_to(p):
                why = f"needs p >= {spec.min_prime}" if p < spec.min_prime else "excluded or divides a denominator"
                out.write(f"{spec.name} p={p}: skipped ({why})\n")
                reports.append(CongruenceReport(spec.name, p, m, None, None, None, f"skipped: {why}"))
                continue
            lhs, rhs = congruence_residue(spec, p, m)
            ok = lhs == rhs
            out.write(f"{spec.name} p={p} mod p^{m}: {'pass' if ok else 'FAIL'}\n")
            reports.append(CongruenceReport(spec.name, p, m, lhs, rhs, ok))
            if not ok:
                worst = EXIT_RECOGNITION
    if args.out:
        ResultStore(args.out).append(reports)
    return worst


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invpi2", description="Ramanujan-like series for 1/pi^2 from Calabi-Yau operators.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frobenius", help="print the Frobenius coefficients a0..a4")
    p.add_argument("case")
    p.add_argument("--order", type=int, default=10)
    p.set_defaults(fn=cmd_frobenius)

    p = sub.add_parser("invariants", help="print e, h, f")
    p.add_argument("case")
    p.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    p.add_argument("--order", type=int, default=100)
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("hunt", help="search a k-grid for rational j")
    p.add_argument("case")
    p.add_argument("--k-grid", default=DEFAULT_GRID, help="i/DEN:LO..HI or a comma list (default %(default)s)")
    p.add_argument("--sign", choices=["+", "-"], default="+")
    p.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--seq", help="A_n expression (overrides the case's)")
    p.add_argument("--invariants", help="e,h,f (overrides the case's)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--all", action="store_true", help="also print rejected grid points")
    p.add_argument("--out", help="append candidates to this JSON-lines file")
    p.set_defaults(fn=cmd_hunt)

    p = sub.add_parser("verify", help="check series records numerically")
    p.add_argument("file")
    p.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    p.add_argument("--min-digits", type=int, default=40)
    p.add_argument("--partial-terms", type=int, default=200)
    p.add_argument("--name", action="append")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("congruence", help="check supercongruences")
    p.add_argument("file")
    p.add_argument("--primes", default="5..50")
    p.add_argument("--mod-exp", type=int, default=None)
    p.add_argument("--name", action="append")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_congruence)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "digits", DEFAULT_DIGITS) < 15:
        sys.stderr.write("invpi2: --digits must be at least 15\n")
        return EXIT_USAGE
    try:
        return args.fn(args, out)
    except (UsageError, SeqError) as exc:
        sys.stderr.write(f"invpi2: {exc}\n")
        return EXIT_USAGE
    except InsufficientOrder as exc:
        sys.stderr.write(f"invpi2: numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except RecognitionError as exc:
        sys.stderr.write(f"invpi2: recognition failure: {exc}\n")
        return EXIT_RECOGNITION
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"invpi2: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
