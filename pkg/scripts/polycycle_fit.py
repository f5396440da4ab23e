"""Power law of T'(h) at the polycycle across F for a fixed D.

Prints gamma_fit against 1/2 - xi and the sign of the prefactor, which flips
at F = 2.
"""
import argparse

import numpy as np

from loudcrit.asymptotics import catalog_n0, xi_value
from loudcrit.errors import LoudError
from loudcrit.loud_core import Params
from loudcrit.period import fit_polycycle_asymptotics
from loudcrit.potential import PotentialModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-D", type=float, default=-1.0)
    ap.add_argument("--f-lo", type=float, default=1.55)
    ap.add_argument("--f-hi", type=float, default=2.45)
    ap.add_argument("--n", type=int, default=10)
    args = ap.parse_args()

    print(f"{'F':>6} {'gamma_fit':>11} {'1/2-xi':>9} {'Delta*':>12} {'a_l':>10}")
    for F in np.linspace(args.f_lo, args.f_hi, args.n):
        mu = Params(args.D, float(F))
        if not mu.in_lambda or abs(F - 2.0) < 1e-3:
            continue
        cat = catalog_n0(mu)
        xi = xi_value(cat).xi
        try:
            fit = fit_polycycle_asymptotics(PotentialModel(mu))
        except LoudError as exc:
            print(f"{F:6.3f}  {type(exc).__name__}: {exc}")
            continue
        print(f"{F:6.3f} {fit.gamma_fit:11.5f} {0.5 - xi:9.5f} {fit.delta_star_fit:12.5e} {cat.a_l:10.3e}")


if __name__ == "__main__":
    main()
