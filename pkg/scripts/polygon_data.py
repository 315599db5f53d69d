"""Write Newton and valuation polygon vertex data (computed and closed form) as CSV files."""
import argparse
import os
import sys
from pathlib import Path

from padic_psi import polygons
from padic_psi.psi import solve_psi

CASES = {2: (2, 1, 64), 3: (3, 1, 81), 4: (2, 2, 64), 5: (5, 1, 125)}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.environ.get("PADIC_PSI_OUTPUT_DIR", "polygon_data"))
    ap.add_argument("--q", type=int, nargs="*", default=sorted(CASES))
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for q in args.q:
        p, f, N = CASES[q]
        vals = solve_psi(p, f, N).valuations()
        nw, va = polygons.newton_polygon(vals), polygons.valuation_polygon(vals)
        i_max = 0
        while q ** (i_max + 1) <= N:
            i_max += 1
        files = {
            f"newton_q{q}.csv": nw,
            f"newton_q{q}_closed.csv": polygons.closed_form_newton(q, i_max),
            f"valuation_q{q}.csv": va,
            f"valuation_q{q}_closed.csv": polygons.closed_form_valuation(q, i_max),
        }
        for name, poly in files.items():
            (out / name).write_text(poly.to_csv())
        with open(out / f"points_q{q}.csv", "w") as fh:
            fh.write("x,y\n")
            for n, v in vals:
                if n and v != float("inf"):
                    fh.write(f"{-n},{v}\n")
        agree = polygons.compare_with_closed_form(nw, q, N) and polygons.dual_polygon(nw) == va
        print(f"q={q} N={N}: {len(nw.vertices)} Newton vertices, {len(va.vertices)} valuation vertices, "
              f"closed form {'match' if agree else 'MISMATCH'}")
    print(f"wrote CSV files to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
