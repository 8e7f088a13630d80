"""Write Hilbert-refinement polylines as SVG files and print their statistics."""

import argparse
from pathlib import Path

from hypcayley.chains import euclid, grid_cover_radius, hilbert_centers, hilbert_refinement, hilbert_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    print("level,points,gap,cover_radius,certified,file")
    for k in range(1, args.levels + 1):
        pts = hilbert_centers(k)
        gaps = {euclid(a, b) for a, b in zip(pts, pts[1:])}
        path = args.out / f"hilbert_{k}.svg"
        path.write_text(hilbert_svg(pts))
        cert = hilbert_refinement(k).certified
        print(f"{k},{len(pts)},{max(gaps)},{grid_cover_radius(pts, k)},{cert},{path}")


if __name__ == "__main__":
    main()
