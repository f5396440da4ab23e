"""Tabulate the bifurcation curve D = G(F) and write it as CSV.

    python scripts/curve_table.py --n 40 --out curve.csv
"""
import argparse
import csv
import sys

import numpy as np

from loudcrit.delta import tabulate_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f-lo", type=float, default=1.005)
    ap.add_argument("--f-hi", type=float, default=1.499)
    ap.add_argument("--n", type=int, default=40)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    rows = tabulate_curve(np.linspace(args.f_lo, args.f_hi, args.n))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["F", "G", "residual", "low_confidence", "sign_changes"])
    for r in rows:
        w.writerow([f"{r.F:.6f}", f"{r.G:.15g}", f"{r.residual:.3g}", int(r.low_confidence), r.sign_changes])
    if args.out:
        fh.close()
        good = [r for r in rows if r.error is None]
        print(f"{len(good)}/{len(rows)} points, G from {good[0].G:.6f} to {good[-1].G:.6f}")


if __name__ == "__main__":
    main()
