"""Build boundary chains between sampled ray pairs of the genus-2 surface group.

Needs roughly 2 GB of memory for the radius-8 ball.
"""

import argparse
import json

from hypcayley import ddag
from hypcayley.backends import make_backend
from hypcayley.boundary import VisualMetricParams, boundary_gromov_product, enumerate_rays
from hypcayley.cayley import build_ball
from hypcayley.chains import BoundaryChainParams, boundary_chain
from hypcayley.ddag import DdagConstants
from hypcayley.errors import HypCayleyError
from hypcayley.geometry import delta_four_point
from hypcayley.presentation import load_presentation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=8)
    ap.add_argument("--pairs", type=int, default=6)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--window", type=int, default=2)
    ap.add_argument("--product-x2", type=int, default=4, help="doubled product of the chosen pairs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    pres = load_presentation("surface2")
    ball = build_ball(make_backend(pres), args.radius, 10**7)
    d_x2 = delta_four_point(ball).delta_four_point_x2
    L = ddag.test_ddag(ball, 3, 0, 2, 3, budget=64, visible_only=False).constants.L
    vis = VisualMetricParams.from_delta(d_x2)
    params = BoundaryChainParams(args.m, DdagConstants.derive(0, L, 3), vis)
    print(json.dumps({"delta_x2": d_x2, "L": L, "m": args.m, "rho_theory": params.rho}))

    rays = enumerate_rays(ball, args.radius, "sample", count=60, seed=args.seed)
    done = 0
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            if done >= args.pairs:
                return
            if boundary_gromov_product(ball, rays[i], rays[j], args.window) != args.product_x2:
                continue
            done += 1
            try:
                ch = boundary_chain(ball, rays[i], rays[j], params, window=args.window)
            except HypCayleyError as exc:
                print(json.dumps({"pair": [i, j], "error": exc.code, "message": str(exc)}))
                continue
            doc = ch.to_dict(pres.generators)
            print(json.dumps({"pair": [i, j], "length": doc["length"], "rho_empirical": doc["rho_empirical"],
                              "products_x2": doc["products_x2"]}))


if __name__ == "__main__":
    main()
