"""Empirical convergence of the covector addition law: residual valuations by level n."""
import argparse
import math
import statistics
import sys

from padic_psi import analysis
from padic_psi.cli import DEFAULT_SEED, addition_pairs
from padic_psi.padic import FieldContext
from padic_psi.psi import solve_psi


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, nargs="*", default=[2, 3])
    ap.add_argument("--pairs", type=int, default=20)
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--width", type=int, default=60)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = ap.parse_args(argv)
    for p in args.p:
        psi = solve_psi(p, 1, 64)
        table = []
        for x, y in addition_pairs(p, args.pairs, args.seed + p, args.width):
            table.append(analysis.addition_law_check(psi, x, y, args.n_max, args.width))
        print(f"p={p}: residual valuation r_n over {len(table)} pairs (width {args.width})")
        print("   n   min  median   max")
        for n in range(args.n_max + 1):
            col = [row[n] for row in table if row[n] != math.inf]
            cap = "+" if max(col) >= args.width else ""
            print(f"{n:4d} {min(col):5d} {statistics.median(col):7.1f} {max(col):5d}{cap}")
        one = FieldContext(p).one(args.width)
        ones = analysis.addition_law_check(psi, one, one, args.n_max, args.width)
        print(f"   x = y = 1: {ones}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
