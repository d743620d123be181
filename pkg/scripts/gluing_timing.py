#!/usr/bin/env python3
"""Exact gluing and line-bundle cocycle checks on a range of atlases, with wall times."""
import argparse
import time

from nuchern.atlas import build_atlas, verify_gluing, verify_line_cocycle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="+", default=["1,1", "2,1", "1,2", "3,2", "2,3"],
                    help="m,n pairs")
    ap.add_argument("--samples", type=int, default=20, help="numeric points per cocycle triple")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    print(f"{'m|n':>5} {'charts':>6} {'gluing':>8} {'checks':>6} {'s':>7} {'cocycle':>8} {'checks':>6} {'s':>7}")
    for text in args.sizes:
        m, n = (int(x) for x in text.split(","))
        atlas = build_atlas(m, n)
        t0 = time.perf_counter()
        g = verify_gluing(atlas)
        t1 = time.perf_counter()
        c = verify_line_cocycle(atlas, args.samples, args.seed)
        t2 = time.perf_counter()
        print(f"{m}|{n:<3} {atlas.size:>6} {g.overall:>8} {len(g.checks):>6} {t1 - t0:>7.2f} "
              f"{c.overall:>8} {len(c.checks):>6} {t2 - t1:>7.2f}")


if __name__ == "__main__":
    main()
