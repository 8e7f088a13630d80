"""Four-point and thin-triangle delta estimates against ball radius."""

import argparse

from hypcayley.backends import make_backend
from hypcayley.cayley import build_ball
from hypcayley.geometry import EnumerationPolicy, delta_four_point, extendability_constant
from hypcayley.presentation import FIXTURES, load_presentation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radii", type=int, nargs="+", default=[2, 4, 6])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    pol = EnumerationPolicy(samples=args.samples, seed=args.seed)
    print("fixture,radius,region,exhaustive,delta4_x2,thin_x2,C")
    for name in FIXTURES:
        backend = make_backend(load_presentation(name))
        for R in args.radii:
            ball = build_ball(backend, R)
            est = delta_four_point(ball, pol)
            C = extendability_constant(ball, min(2, R - 1)).C if R > 1 else ""
            print(f"{name},{R},{est.region_size},{est.exhaustive},{est.delta_four_point_x2},{est.delta_thin_x2},{C}")


if __name__ == "__main__":
    main()
