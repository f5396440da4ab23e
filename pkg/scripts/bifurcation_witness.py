"""Critical periods near the polycycle on both sides of the curve.

For D = G(F) +- offset the sign of T'(h) is scanned on a ladder in h0 - h;
only one side should show a critical period emerging from h0.
"""
import argparse

import numpy as np

from loudcrit.delta import curve_g, delta
from loudcrit.loud_core import Params
from loudcrit.period import period_derivative, scan_critical_periods
from loudcrit.potential import PotentialModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-F", type=float, default=1.4)
    ap.add_argument("--offset", type=float, default=0.02)
    ap.add_argument("--samples", type=int, default=40)
    args = ap.parse_args()

    G = curve_g(args.F).G
    print(f"F = {args.F}, G(F) = {G:.12f}")
    for D in (G - args.offset, G + args.offset):
        m = PotentialModel(Params(D, args.F))
        h0 = m.h0
        scan = scan_critical_periods(m, 0.95 * h0, h0 * (1 - 1e-12), args.samples)
        print(f"\nD = {D:.6f}  Delta = {delta(m.mu):+.4e}  critical periods: {scan.count}")
        for h in scan.locations:
            print(f"  h0 - h = {h0 - h:.4e} h0 = {(h0 - h) / h0:.4e}")
        for g in np.geomspace(5e-2, 1e-10, 6):
            print(f"  (h0-h)/h0 = {g:.0e}  T' = {period_derivative(m, h0 * (1 - g), g * h0, 'integral'):+.6e}")


if __name__ == "__main__":
    main()
