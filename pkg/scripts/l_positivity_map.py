"""Sign of L(1 - p1) = V'(u_r)^2 - 2 h0 V''(u_r) over Lambda.

Reports where it fails to be positive; the failures sit in F > 2 next to
D = -1/2.
"""
import argparse

import numpy as np

from loudcrit.potential import l_at_boundary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f-max", type=float, default=2.5)
    ap.add_argument("--n", type=int, default=400)
    args = ap.parse_args()

    F, t = np.meshgrid(np.linspace(1.001, args.f_max, args.n), np.linspace(0.0005, 0.9995, args.n))
    D = -F + t * (F - 0.5)
    keep = D >= -2.5
    L = l_at_boundary(D, F)
    neg = (L <= 0) & keep
    print(f"{keep.sum()} nodes, {neg.sum()} with L <= 0")
    if neg.any():
        print(f"  F in [{F[neg].min():.4f}, {F[neg].max():.4f}], D in [{D[neg].min():.4f}, {D[neg].max():.4f}]")
        print(f"  min L = {L[keep].min():.4e}")
    Fa = np.linspace(1.1, args.f_max, 8)
    anchor = (Fa**Fa * (Fa - 1) ** (1 - Fa) + 2 - 3 * Fa) / (4 * Fa * Fa * (Fa - 1))
    print("L at D = -1/2:")
    for f, a in zip(Fa, anchor):
        print(f"  F = {f:.3f}  {a:+.4e}")


if __name__ == "__main__":
    main()
