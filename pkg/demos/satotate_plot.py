#!/usr/bin/env python3
"""Sato-Tate histogram of a registry curve, printed as text, with the
split-prime count next to sum 1/sqrt(l)."""
import argparse

import numpy as np

from rmsplit import frob


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--curve", default="ttv1")
    ap.add_argument("-X", type=int, default=1000)
    ap.add_argument("--bins", type=int, default=8)
    args = ap.parse_args()

    entry = frob.get_curve(args.curve)
    s = frob.sato_tate_scan(entry.curve, entry.D, args.X, bins=args.bins)
    print(f"{entry.label}: {entry.note}")
    print(f"good primes {len(s.records)}, bad {s.bad_primes}")
    for k, v in sorted(s.counts.items()):
        print(f"  {k:30s} {v}")
    print(f"split {s.split_count()}  sum 1/sqrt(l) {s.sum_inv_sqrt:.3f}")

    expected = frob.st_bin_masses(args.bins, ordered=True) * len(s.records)
    print("\nobserved / expected per bin (rows s1, cols s2)")
    for i in range(args.bins):
        print(" ".join(f"{int(s.histogram[i, j]):3d}/{expected[i, j]:4.1f}"
                       for j in range(args.bins)))
    rms = np.sqrt(np.mean((s.histogram - expected) ** 2))
    print(f"rms deviation {rms:.2f}")


if __name__ == "__main__":
    main()
