#!/usr/bin/env python3
"""Plant a CM point, hide it with a random Gamma element, and recover it
from two divisor components through it."""
import argparse
import math

import numpy as np

from rmsplit import hecke
from rmsplit.hzdiv import ComponentMatrix
from rmsplit.numberfield import QuadraticField

F5 = QuadraticField.from_discriminant(5)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    # (i, i) lies on (5k, 5k, c sqrt5) for all k, c; det 5(5k^2 + c^2)
    base = hecke.PointH2(1j, 1j)
    pairs = [(2, 3, 29), (1, 6, 41)]
    for t in range(args.trials):
        g = hecke.random_gamma(F5, rng)
        truth = hecke.moebius_act(g, base)
        near = []
        for k, c, p in pairs:
            M = ComponentMatrix(5 * k, 5 * k, F5.sqrtD * c)
            near.append(hecke.NearMiss.from_component(hecke.transport(g.inverse(), M), p, 5))
        z, (A, B, C) = hecke.cm_point(*near)
        err = z.distance(truth)
        print(f"trial {t}: A={A} B={B} C={C}")
        print(f"  recovered ({z.z1:.6f}, {z.z2:.6f}) error {err:.2e}")
        print(f"  -log10 error = {-math.log10(max(err, 1e-300)):.1f}")
    Q = hecke.special_point_form(base, F5)
    print("\nspecial lattice form at (i, i):", Q.triple())


if __name__ == "__main__":
    main()
