"""L(R) tables for the avoidance property on each fixture.

Free and Z^2 searches are exact (visibility-bounded).  The surface group needs
detours longer than a desk-scale ball can certify, so its search runs to the
budget inside the ball and maxL is an upper bound.
"""

import argparse
import sys

from hypcayley import ddag
from hypcayley.backends import make_backend
from hypcayley.cayley import build_ball
from hypcayley.presentation import load_presentation

RUNS = [
    # fixture, ball radius, M, C, Rmin, Rmax, budget, upper-bound mode
    ("free2", 11, 3, 0, 2, 5, None, False),
    ("z2", 14, 3, 0, 3, 8, None, False),
    ("surface2", 8, 3, 0, 2, 4, 64, True),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--skip-surface", action="store_true")
    args = ap.parse_args()
    for name, Rb, M, C, lo, hi, budget, upper in RUNS:
        if args.skip_surface and name == "surface2":
            continue
        ball = build_ball(make_backend(load_presentation(name)), Rb, 10**7)
        rep = ddag.test_ddag(ball, M, C, lo, hi, budget=budget, visible_only=not upper)
        mode = "upper bound" if upper else "exact"
        print(f"# {name}: ball radius {Rb}, M={M}, C={C}, {mode}, verdict {rep.verdict}")
        sys.stdout.write(rep.to_csv())


if __name__ == "__main__":
    main()
