#!/usr/bin/env python3
"""Walk through Q(sqrt D): unit, split primes, and the HZ divisors T(r)."""
import argparse

from rmsplit import hzdiv
from rmsplit.numberfield import QuadraticField, fundamental_unit, split_generator, splitting_type


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-D", type=int, default=5)
    ap.add_argument("--primes", type=int, default=60)
    ap.add_argument("--rmax", type=int, default=30)
    args = ap.parse_args()

    F = QuadraticField.from_discriminant(args.D)
    u = fundamental_unit(F)
    print(f"field D={F.D}, fundamental unit {u} (norm {u.norm()})")
    for p in range(3, args.primes):
        try:
            kind = splitting_type(F, p)
        except Exception:
            continue
        lam = split_generator(F, p)
        extra = f" generator {lam}" if lam is not None else ""
        print(f"  p={p:3d} {kind.name.lower()}{extra}")

    print("\nr   nonempty  compact  ramified")
    for r in range(1, args.rmax + 1):
        ne = hzdiv.hz_nonempty(r, F)
        cp = ne and hzdiv.hz_is_compact(r, F)
        ram = sorted(hzdiv.quaternion_ramified_primes(F.D, -r)) if ne else "-"
        print(f"{r:<3d} {ne!s:9s} {cp!s:8s} {ram}")


if __name__ == "__main__":
    main()
