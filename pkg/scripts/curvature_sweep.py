#!/usr/bin/env python3
"""Run the supermatrix curvature suite over several dimensions and seeds.

Each row reports pass/fail counts and wall time; failures are listed by name.
"""
import argparse
import time

from nuchern.charclass import curvature_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", nargs="+", default=["1,0", "1,1", "2,1"], help="k,l pairs")
    ap.add_argument("--seeds", nargs="+", type=int, default=[7, 42])
    ap.add_argument("--charts", type=int, default=3)
    ap.add_argument("--max-degree", type=int, default=6)
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--nu0", action="store_true", help="attach nu0 weights to odd chart pairs")
    args = ap.parse_args()

    for text in args.dims:
        k, l = (int(x) for x in text.split(","))
        for seed in args.seeds:
            t0 = time.perf_counter()
            rep = curvature_suite(k, l, args.charts, seed, args.max_degree, args.kmax,
                                  numeric_trials=50 if l else 0, nu0_weights=args.nu0)
            dt = time.perf_counter() - t0
            bad = [c.name for c in rep.failures()]
            print(f"{k}|{l} seed={seed:<4} checks={len(rep.checks):<4} failed={len(bad):<3} {dt:6.1f}s")
            for name in bad:
                print(f"    {name}")


if __name__ == "__main__":
    main()
