#!/usr/bin/env python3
"""Sample random modules over a family of small rings and report, per
ring, the fraction that admit a bounded chain down to a free module.

Exploratory only: absence within the bounds is not absence.  The preset
family walks the truncation degree and the embedding dimension across
F_2 and F_3.
"""

import argparse
import sys

from redhom.algebra import build_algebra
from redhom.corpus import ExploreConfig, explore_q22
from redhom.linalg import GF2, GF3
from redhom.reducing import SearchConfig


def preset_family():
    fields = {"F2": GF2, "F3": GF3}
    family = []
    for fname, fld in fields.items():
        for power in (2, 3, 4):
            family.append((f"{fname}[x]/x^{power}",
                           build_algebra(fld, ["x"], [], power)))
        family.append((f"{fname}[x,y]/m^2",
                       build_algebra(fld, ["x", "y"], [], 2)))
        family.append((f"{fname}[x,y,z]/m^2",
                       build_algebra(fld, ["x", "y", "z"], [], 2)))
    return family


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=12,
                        help="modules drawn per ring")
    parser.add_argument("--max-gens", type=int, default=2)
    parser.add_argument("--max-rels", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-r", type=int, default=1,
                        help="chain length bound for the search")
    parser.add_argument("--max-a", type=int, default=6)
    parser.add_argument("--max-b", type=int, default=2)
    parser.add_argument("--max-n", type=int, default=1)
    parser.add_argument("--budget", type=int, default=60)
    parser.add_argument("--window", type=int, default=6)
    args = parser.parse_args(argv)

    cfg = ExploreConfig(
        samples=args.samples, max_gens=args.max_gens,
        max_rels=args.max_rels, seed=args.seed,
        search=SearchConfig(max_r=args.max_r, max_a=args.max_a,
                            max_b=args.max_b, max_n=args.max_n,
                            budget=args.budget, window=args.window))
    rows = explore_q22(preset_family(), cfg)

    width = max(len(r["ring"]) for r in rows)
    print(f"{'ring':<{width}}  found/samples  fraction")
    for row in rows:
        print(f"{row['ring']:<{width}}  "
              f"{row['found']:>5}/{row['samples']:<7}  "
              f"{row['fraction']:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
