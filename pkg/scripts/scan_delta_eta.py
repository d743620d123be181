#!/usr/bin/env python3
"""Scan delta eta over every triple and window combination, under both L conventions.

Prints, per convention, how many cells are constant and the values seen at one
triple broken down by which argument sector each chart-k sample falls in.
"""
import argparse
import json
import math
import random
from collections import Counter, defaultdict

from nuchern.atlas import build_atlas, line_cocycle, random_point
from nuchern.nuclass import BranchAssignment, delta_eta, scan_delta_eta
from nuchern.numeric import Window, eval_numeric


def sector(w: complex) -> int:
    """Quadrant of arg(w) in [0, 2pi), numbered 0..3."""
    return int((math.atan2(w.imag, w.real) % (2 * math.pi)) // (math.pi / 2))


def by_sector(atlas, triple, samples, seed, convention):
    i, j, k = triple
    rng = random.Random(seed)
    table = defaultdict(Counter)
    for _ in range(samples):
        pt = random_point(atlas, k, rng)
        key = []
        for a, b in ((j, k), (i, k)):
            h = eval_numeric(line_cocycle(atlas, a, b), pt)
            b0, b1 = h.body_pair()
            key.append(sector(b1 if abs(b1) > abs(b0) else b0))
        d = delta_eta(atlas, i, j, k, pt, BranchAssignment(Window.ZERO_TWO_PI), convention)
        p, q = d.value.as_tuple()
        table[tuple(key)][f"({p}, {q})"] += 1
    return table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--triple", type=int, nargs=3, default=(2, 4, 1))
    ap.add_argument("--json", help="write the full scan reports here")
    args = ap.parse_args()

    atlas = build_atlas(args.m, args.n)
    dump = {}
    for conv in ("signed", "literal"):
        rep = scan_delta_eta(atlas, args.samples, args.seed, conv)
        dump[conv] = rep.to_dict(timing=False)
        n = len(rep.checks)
        bad = len(rep.failures())
        print(f"[{conv}] {n} cells, {n - bad} constant, {bad} with more than one value")
        t = tuple(args.triple)
        head = [c for c in rep.checks if c.name.startswith(f"delta_eta({t[0]},{t[1]},{t[2]})")]
        for c in head:
            print(f"    {c.name}: {c.details['values']}")
        print("    default window, by (sector of h_jk, sector of h_ik):")
        for key, cnt in sorted(by_sector(atlas, t, args.samples, args.seed, conv).items()):
            print(f"      {key}: {dict(cnt)}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(dump, fh, indent=1)


if __name__ == "__main__":
    main()
