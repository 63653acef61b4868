"""Time the series product kernels: schoolbook, Karatsuba and mpf fdot.

    python3 benchmarks/bench_series.py [--sizes 64,128,256,512] [--digits 120] [--repeat 3]

Rational inputs use Frobenius-like coefficients (the a_0 series of case t8);
mpf inputs are the same values at the given precision.
"""

import argparse
import timeit
from fractions import Fraction

from invpi2.cyode import frobenius_solve, hypergeometric_operator
from invpi2.numkernel import context, to_mpf
from invpi2.registry import HYPERGEOMETRIC
from invpi2.series import convolve


def inputs(n: int, digits: int):
    F = frobenius_solve(hypergeometric_operator(HYPERGEOMETRIC["t8"]), n - 1)
    a = list(F[1].coeffs)
    b = list(F[2].coeffs)
    ctx = context(digits)
    return a, b, [to_mpf(x, ctx) for x in a], [to_mpf(x, ctx) for x in b]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256,512")
    ap.add_argument("--digits", type=int, default=120)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'n':>6} {'school':>10} {'karatsuba':>10} {'fdot':>10}   (seconds, best of {args.repeat})")
    for n in (int(s) for s in args.sizes.split(",")):
        a, b, am, bm = inputs(n, args.digits)
        assert convolve(a, b, n, "school") == convolve(a, b, n, "karatsuba")
        row = []
        for method, x, y in (("school", a, b), ("karatsuba", a, b), ("fdot", am, bm)):
            t = min(timeit.repeat(lambda: convolve(x, y, n, method), number=1, repeat=args.repeat))
            row.append(t)
        print(f"{n:>6} " + " ".join(f"{t:>10.4f}" for t in row))


if __name__ == "__main__":
    main()
