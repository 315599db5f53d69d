"""Recompute the bundled coefficient and valuation tables and diff them against the fixtures."""
import argparse
import json
import math
import sys
import time
from importlib import resources

from padic_psi.padic import vp
from padic_psi.psi import solve_psi


def load(name):
    return json.loads(resources.files("padic_psi").joinpath("data", name).read_text())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--show", action="store_true", help="print every row, not just the summary")
    args = ap.parse_args(argv)
    failures = 0

    t0 = time.perf_counter()
    psi2 = solve_psi(2, 1, 32)
    rows = load("psi2_coefficients.json")["coefficients"]
    bad = [r["n"] for r in rows if psi2.b(r["n"]) != int(r["value"])]
    print(f"Psi_2 exact b_1..b_{len(rows)}: {len(rows) - len(bad)}/{len(rows)} match "
          f"({time.perf_counter() - t0:.3f}s)")
    if args.show:
        for r in rows:
            print(f"  b_{r['n']:<3d} = {psi2.b(r['n'])}")
    failures += len(bad)

    for p, name, N in ((2, "psi2_valuations.json", 32), (3, "psi3_valuations.json", 81)):
        psi = psi2 if p == 2 else solve_psi(p, 1, N)
        rows = load(name)["valuations"]
        bad = [r["n"] for r in rows if vp(psi.b(r["n"]), p) != r["valuation"]]
        print(f"v_{p}(b_n) table: {len(rows) - len(bad)}/{len(rows)} match" + (f", bad n={bad}" if bad else ""))
        if args.show:
            print("  " + " ".join(f"{r['n']}:{vp(psi.b(r['n']), p)}" for r in rows))
        failures += len(bad)

    for series in load("leading_terms.json")["series"]:
        p = series["p"]
        psi = solve_psi(p, 1, max(t["n"] for t in series["terms"]))
        for t in series["terms"]:
            b = psi.b(t["n"])
            if "valuation" in t:
                ok = vp(b, p) == t["valuation"]
                shown = f"v_{p} = {vp(b, p)}"
            else:
                ok = b == t["sign"] * math.prod(t["cofactor"]) * p ** t["p_power"]
                cof = "*".join(map(str, t["cofactor"])) or "1"
                shown = f"{'-' if b < 0 else ''}{cof} * {p}^{vp(b, p)}"
            print(f"Psi_{p} b_{t['n']}: {shown}  {'ok' if ok else 'MISMATCH'}")
            failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
