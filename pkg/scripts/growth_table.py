"""Sphere sizes and build times for the fixture groups."""

import argparse
import time

from hypcayley.backends import make_backend
from hypcayley.cayley import build_ball
from hypcayley.presentation import FIXTURES, load_presentation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=6)
    ap.add_argument("--max-vertices", type=int, default=None)
    args = ap.parse_args()
    print("fixture,radius,vertices,seconds,sphere_sizes")
    for name in FIXTURES:
        t = time.perf_counter()
        ball = build_ball(make_backend(load_presentation(name)), args.radius, args.max_vertices)
        dt = time.perf_counter() - t
        sizes = " ".join(map(str, ball.sphere_sizes()))
        print(f"{name},{args.radius},{ball.num_vertices},{dt:.3f},{sizes}")


if __name__ == "__main__":
    main()
