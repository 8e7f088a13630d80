"""Command-line front end: ``hypcayley <command> [options]``.

Exit status: 0 success, 1 domain error (JSON error object on stdout), 2 usage error.
"""

import argparse
import sys
from dataclasses import dataclass
from typing import List, Optional

from . import ddag as ddag_mod
from .backends import make_backend
from .boundary import (
    VisualMetricParams,
    distance_matrix_csv,
    enumerate_rays,
    pairwise_products,
    ray_from_word,
    visual_distance,
)
from .cayley import build_ball
from .chains import BoundaryChainParams, boundary_chain, euclid, grid_cover_radius, hilbert_centers, hilbert_refinement, hilbert_svg
from .ddag import DdagConstants
from .errors import HypCayleyError
from .geometry import EnumerationPolicy, delta_four_point, extendability_constant
from .presentation import load_presentation
from .report import emit_report, round12, to_json
from .words import format_word, parse_word


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class _Doc:
    doc: dict
    csv: Optional[str] = None
    svg: Optional[str] = None

    def to_dict(self):
        return self.doc

    def __getattr__(self, name):
        if name == "to_csv" and self.csv is not None:
            return lambda: self.csv
        if name == "to_svg" and self.svg is not None:
            return lambda: self.svg
        raise AttributeError(name)


def _ball(args):
    pres = load_presentation(args.presentation)
    backend = make_backend(pres, args.backend)
    return build_ball(backend, args.radius, args.max_vertices)


def _delta_x2(args, ball) -> int:
    if args.delta_x2 is not None:
        return args.delta_x2
    return delta_four_point(ball, EnumerationPolicy(seed=args.seed)).delta_four_point_x2


def cmd_ball(args):
    ball = _ball(args)
    doc = {
        "schema": "hypcayley.ball/1",
        "generators": list(ball.presentation.generators),
        "backend": ball.backend.kind,
        "radius": ball.radius,
        "vertices": ball.num_vertices,
        "sphere_sizes": ball.sphere_sizes(),
    }
    if args.verify:
        doc["edges_verified"] = ball.verify_identifications()
    if args.words:
        doc["words"] = [ball.format(v) for v in range(ball.num_vertices)]
    return _Doc(doc, csv=ball.to_csv() if args.format == "csv" else None)


def cmd_delta(args):
    ball = _ball(args)
    force = None if args.policy == "auto" else args.policy
    pol = EnumerationPolicy(args.threshold, args.samples, args.seed, force)
    return delta_four_point(ball, pol)


def cmd_extend(args):
    return extendability_constant(_ball(args), args.margin)


def cmd_ddag(args):
    ball = _ball(args)
    return ddag_mod.test_ddag(
        ball, args.M, args.C, args.Rmin, args.Rmax, budget=args.budget, visible_only=not args.upper_bound
    )


def cmd_bdist(args):
    ball = _ball(args)
    rmax = args.rmax or ball.radius
    vis = VisualMetricParams.from_delta(_delta_x2(args, ball), args.a, args.D_x2)
    window = args.window if args.window is not None else vis.window
    rays = enumerate_rays(ball, rmax, args.policy, count=args.count, seed=args.seed)
    P = pairwise_products(ball, rays, window)
    gens = ball.presentation.generators
    pairs = [
        {"i": i, "j": j, "product_x2": int(P[i, j]), "visual": round12(visual_distance(vis, int(P[i, j])))}
        for i in range(len(rays))
        for j in range(i + 1, len(rays))
    ]
    doc = {
        "schema": "hypcayley.bdist/1",
        "params": vis.to_dict(),
        "window": window,
        "rays": [format_word(r.word, gens) for r in rays],
        "pairs": pairs,
    }
    return _Doc(doc, csv=distance_matrix_csv(rays, P, vis))


def cmd_chain(args):
    ball = _ball(args)
    gens = ball.presentation.generators
    x = ray_from_word(ball, parse_word(args.ray1, gens), 0)
    x2 = ray_from_word(ball, parse_word(args.ray2, gens), 1)
    vis = VisualMetricParams.from_delta(_delta_x2(args, ball), args.a, args.D_x2)
    C = args.C if args.C is not None else extendability_constant(ball, min(2, ball.radius - 1)).C
    consts = DdagConstants.derive(C, args.L)
    params = BoundaryChainParams(args.m, consts, vis) if args.m else BoundaryChainParams.admissible(vis, consts)
    ch = boundary_chain(ball, x, x2, params, window=args.window)
    doc = ch.to_dict(gens)
    doc["m"] = params.m
    doc["constants"] = consts.to_dict()
    doc["visual"] = vis.to_dict()
    return _Doc(doc)


def cmd_hilbert(args):
    k = args.levels
    pts = hilbert_centers(k)
    ref = hilbert_refinement(k) if k else None
    gaps = sorted({euclid(a, b) for a, b in zip(pts, pts[1:])})
    cover = grid_cover_radius(pts, k)
    doc = {
        "schema": "hypcayley.hilbert/1",
        "levels": k,
        "count": len(pts),
        "points": [[str(x), str(y)] for x, y in pts],
        "gaps": gaps,
        "density_radius": cover,
        "density_ok": cover is not None,
        "refinement_certified": True if ref is None else ref.certified,
    }
    return _Doc(doc, svg=hilbert_svg(pts))


COMMANDS = {
    "ball": cmd_ball,
    "delta": cmd_delta,
    "extend": cmd_extend,
    "ddag": cmd_ddag,
    "bdist": cmd_bdist,
    "chain": cmd_chain,
    "hilbert": cmd_hilbert,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hypcayley", description="Coarse geometry of finitely presented groups on finite Cayley balls.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def group_cmd(name, fmts=("json",)):
        sp = sub.add_parser(name)
        sp.add_argument("--presentation", required=True, help="fixture name (free2, z2, surface2) or .grp path")
        sp.add_argument("--backend", default="auto", choices=["auto", "free", "abelian", "dehn", "rewriting"])
        sp.add_argument("--radius", type=int, required=True)
        sp.add_argument("--max-vertices", type=int, default=None)
        sp.add_argument("--format", default=fmts[0], choices=list(fmts))
        sp.add_argument("--seed", type=int, default=0)
        return sp

    sp = group_cmd("ball", ("json", "csv"))
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--words", action="store_true")
    sp = group_cmd("delta")
    sp.add_argument("--policy", default="auto", choices=["auto", "exhaustive", "sampled"])
    sp.add_argument("--threshold", type=int, default=EnumerationPolicy.exhaustive_threshold)
    sp.add_argument("--samples", type=int, default=EnumerationPolicy.samples)
    sp = group_cmd("extend")
    sp.add_argument("--margin", type=int, default=0)
    sp = group_cmd("ddag", ("json", "csv"))
    sp.add_argument("--M", type=int, default=None)
    sp.add_argument("--C", type=int, required=True)
    sp.add_argument("--Rmin", type=int, required=True)
    sp.add_argument("--Rmax", type=int, required=True)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--upper-bound", action="store_true", help="search to the budget; maxL becomes an upper bound")
    for name, fmts in (("bdist", ("csv", "json")), ("chain", ("json",))):
        sp = group_cmd(name, fmts)
        sp.add_argument("--delta-x2", type=int, default=None)
        sp.add_argument("--a", type=float, default=None)
        sp.add_argument("--D-x2", type=int, default=None)
        sp.add_argument("--window", type=int, default=None)
    sp = sub.choices["bdist"]
    sp.add_argument("--rmax", type=int, default=None)
    sp.add_argument("--policy", default="one-per-endpoint", choices=["one-per-endpoint", "all", "sample"])
    sp.add_argument("--count", type=int, default=256)
    sp = sub.choices["chain"]
    sp.add_argument("--ray1", required=True)
    sp.add_argument("--ray2", required=True)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--C", type=int, default=None)
    sp = sub.add_parser("hilbert")
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--format", default="json", choices=["json", "svg"])
    return p


def run_command(argv: List[str], out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "radius", 1) is not None and getattr(args, "radius", 1) < 0:
            raise UsageError("--radius must be nonnegative")
        if getattr(args, "levels", 1) < 0:
            raise UsageError("--levels must be nonnegative")
    except UsageError as exc:
        out.write(to_json({"schema": "hypcayley.error/1", "code": "usage", "message": str(exc)}))
        return 2
    try:
        result = COMMANDS[args.command](args)
        data = emit_report(result, args.format)
    except (HypCayleyError, ValueError, OSError) as exc:
        code = exc.code if isinstance(exc, HypCayleyError) else ("io" if isinstance(exc, OSError) else "value")
        out.write(to_json({"schema": "hypcayley.error/1", "code": code, "message": str(exc)}))
        return 1
    out.write(data.decode())
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
