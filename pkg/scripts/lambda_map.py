"""Classify a (D, F) window and summarise the verdicts.

Writes one CSV row per node (grid order, on-curve nodes last) and prints the
count of each verdict, e.g.

    python scripts/lambda_map.py --grid 50 --out map.csv
"""
import argparse
import collections
import csv
import time

from loudcrit.config import Tolerances
from loudcrit.engine import scan_lambda


def main():
    ap = argparse.ArgumentParser(description="Lambda classification map")
    ap.add_argument("--window", type=float, nargs=4, default=(-2.0, -0.5, 1.05, 2.45))
    ap.add_argument("--grid", type=int, default=50)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="lambda_map.csv")
    args = ap.parse_args()

    t0 = time.perf_counter()
    verdicts = scan_lambda(tuple(args.window), args.grid, Tolerances(), workers=args.workers)
    dt = time.perf_counter() - t0

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["D", "F", "case", "xi", "bound", "lower_bound", "a_l"])
        for v in verdicts:
            w.writerow([v.mu.D, v.mu.F, v.case_taken, v.xi, v.bound, v.lower_bound, v.a_l])

    counts = collections.Counter(v.case_taken for v in verdicts)
    print(f"{len(verdicts)} nodes in {dt:.1f} s -> {args.out}")
    for case, k in counts.most_common():
        print(f"  {case:32s} {k}")


if __name__ == "__main__":
    main()
