"""rho-chains: recursive refinement, the Hilbert-curve instance, and boundary chains."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple

from .boundary import RayApprox, VisualMetricParams, boundary_gromov_product, ray_from_word, visual_distance
from .cayley import Ball
from .ddag import DdagConstants, avoid_ball_distance, near_ray, push_path
from .errors import ChainContractError, DisconnectedError, OutOfBallError, PushPathError

# relative slack for float metrics only; exact metrics compare exactly
FLOAT_SLACK = 1e-12


def linear_connectivity_constant(rho, N: int):
    """nu = 2 N rho / (1 - rho); exact for Fraction input."""
    if not 0 < rho < 1:
        raise ValueError("rho must satisfy 0 < rho < 1")
    if N < 1:
        raise ValueError("N must be at least 1")
    return 2 * N * rho / (1 - rho)


def _le(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a <= b + FLOAT_SLACK * max(1.0, abs(b))
    return a <= b


@dataclass(frozen=True)
class Chain:
    points: Tuple[Any, ...]
    endpoints_distance: Any
    rho: Any
    N: int
    gaps: Tuple[Any, ...] = ()

    @property
    def length(self) -> int:
        return len(self.points) - 1

    def gaps_ok(self) -> bool:
        return all(_le(g, self.rho * self.endpoints_distance) for g in self.gaps)


@dataclass(frozen=True)
class ChainRefinement:
    levels: Tuple[Tuple[Any, ...], ...]
    rho: Any
    N: int
    endpoints_distance: Any
    diameters: Tuple[Any, ...]
    bounds: Tuple[Any, ...]

    @property
    def nu(self):
        return linear_connectivity_constant(self.rho, self.N)

    @property
    def certified(self) -> bool:
        return all(_le(d, b) for d, b in zip(self.diameters, self.bounds))


def diameter(points: Sequence[Any], metric: Callable[[Any, Any], Any]):
    best = 0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = metric(points[i], points[j])
            if d > best:
                best = d
    return best


def refine_chain(
    inserter: Callable[[Any, Any], Sequence[Any]],
    x: Any,
    x2: Any,
    rho,
    N: int,
    k: int,
    metric: Callable[[Any, Any], Any],
    key: Callable[[Any], Any] = lambda p: p,
) -> ChainRefinement:
    """Levels S_1..S_k, each inserting an inserter chain between consecutive points.

    Every inserted chain is checked against its contract (endpoints, length <= N,
    gaps <= rho * d(pair)); diameters are certified against 2N(rho + ... + rho^j) d(x, x2).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    d0 = metric(x, x2)
    level = [x, x2]
    levels, diams, bounds = [], [], []
    geo = 0
    for j in range(1, k + 1):
        nxt = [level[0]]
        for p, q in zip(level, level[1:]):
            sub = list(inserter(p, q))
            _check_insert(sub, p, q, rho, N, metric, key)
            nxt[-1] = sub[0]  # same point, possibly re-annotated by the inserter
            nxt.extend(sub[1:])
        if j > 1 and not {key(p) for p in level} <= {key(p) for p in nxt}:
            raise ChainContractError("refinement lost a point of the previous level", None)
        level = nxt
        geo = geo + rho**j
        levels.append(tuple(level))
        diams.append(diameter(level, metric))
        bounds.append(2 * N * geo * d0)
    return ChainRefinement(tuple(levels), rho, N, d0, tuple(diams), tuple(bounds))


def _check_insert(sub, p, q, rho, N, metric, key):
    if not sub or key(sub[0]) != key(p) or key(sub[-1]) != key(q):
        raise ChainContractError("inserted chain does not join the pair", (p, q))
    if len(sub) - 1 > N:
        raise ChainContractError(f"inserted chain has length {len(sub) - 1} > N={N}", (p, q))
    lim = rho * metric(p, q)
    for a, b in zip(sub, sub[1:]):
        if not _le(metric(a, b), lim):
            raise ChainContractError("inserted chain violates its gap bound", (p, q))


# ------------------------------------------------------------------ Hilbert
@dataclass(frozen=True)
class Corner:
    """A corner of the Hilbert polygon; ``side`` orients the segment leaving it."""

    x: Fraction
    y: Fraction
    side: int = 1

    @property
    def xy(self):
        return (self.x, self.y)


def _seg(p: Corner, q: Corner):
    ux, uy = q.x - p.x, q.y - p.y
    nx, ny = -uy * p.side, ux * p.side  # left normal when side = +1
    return ux, uy, nx, ny


def hilbert_inserter(p: Corner, q: Corner) -> List[Corner]:
    """Split the square on segment pq into four: corners p, p+n/2, p+(u+n)/2, q+n/2, q."""
    ux, uy, nx, ny = _seg(p, q)
    if ux and uy:
        raise ValueError("Hilbert segments must be axis-parallel")
    s = p.side
    h = Fraction(1, 2)
    a = Corner(p.x + nx * h, p.y + ny * h, s)
    b = Corner(a.x + ux * h, a.y + uy * h, s)
    c = Corner(q.x + nx * h, q.y + ny * h, -s)
    return [Corner(p.x, p.y, -s), a, b, c, q]


def cell_center(p: Corner, q: Corner) -> Tuple[Fraction, Fraction]:
    ux, uy, nx, ny = _seg(p, q)
    return (p.x + (ux + nx) / 2, p.y + (uy + ny) / 2)


def euclid(p, q) -> float:
    a, b = (p.xy if isinstance(p, Corner) else p), (q.xy if isinstance(q, Corner) else q)
    return math.hypot(float(a[0] - b[0]), float(a[1] - b[1]))


def hilbert_refinement(k: int) -> ChainRefinement:
    start, end = Corner(Fraction(0), Fraction(0), 1), Corner(Fraction(1), Fraction(0), 1)
    return refine_chain(hilbert_inserter, start, end, Fraction(1, 2), 4, k, euclid, key=lambda c: c.xy)


def hilbert_centers(k: int) -> List[Tuple[Fraction, Fraction]]:
    """The 4^k cell centers in Hilbert order (k = 0 gives the square's center)."""
    if k == 0:
        return [(Fraction(1, 2), Fraction(1, 2))]
    corners = hilbert_refinement(k).levels[-1]
    return [cell_center(p, q) for p, q in zip(corners, corners[1:])]


def grid_cover_radius(points: Sequence[Tuple[Fraction, Fraction]], k: int) -> Optional[float]:
    """2^-k sqrt 2 if every dyadic cell of side 2^-k contains a point, else None."""
    n = 2**k
    hit = set()
    for x, y in points:
        for i in {min(int(x * n), n - 1), max(math.ceil(x * n) - 1, 0)}:
            for j in {min(int(y * n), n - 1), max(math.ceil(y * n) - 1, 0)}:
                hit.add((i, j))
    return math.sqrt(2) / n if len(hit) == n * n else None


def hilbert_svg(points: Sequence[Tuple[Fraction, Fraction]], size: int = 512) -> str:
    pts = " ".join(f"{float(x) * size:.3f},{float(1 - y) * size:.3f}" for x, y in points)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">\n'
        f'<rect width="{size}" height="{size}" fill="white" stroke="black"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1"/>\n</svg>\n'
    )


# ---------------------------------------------------------- boundary chains
@dataclass(frozen=True)
class BoundaryChainParams:
    m: int
    constants: DdagConstants
    visual: VisualMetricParams

    @property
    def rho(self) -> float:
        v = self.visual
        return v.k3 / (v.k1 * v.a ** (self.m - 2 * self.constants.C))

    @staticmethod
    def smallest_m(visual: VisualMetricParams, C: int) -> int:
        # smallest integer m with a^m > k3 a^(2C) / k1
        target = math.log(visual.k3 / visual.k1, visual.a) + 2 * C
        m = max(1, math.floor(target))
        while not visual.a**m > visual.k3 * visual.a ** (2 * C) / visual.k1:
            m += 1
        return m

    @classmethod
    def admissible(cls, visual: VisualMetricParams, constants: DdagConstants) -> "BoundaryChainParams":
        return cls(cls.smallest_m(visual, constants.C), constants, visual)


@dataclass(frozen=True)
class BoundaryChain:
    rays: Tuple[RayApprox, ...]
    s_x2: int
    products_x2: Tuple[int, ...]
    gaps: Tuple[float, ...]
    endpoints_distance: float
    rho_theory: float
    rho_empirical: float
    N: int
    beta: Tuple[int, ...]
    alpha: Tuple[int, ...]

    @property
    def certified_theory(self) -> bool:
        return all(_le(g, self.rho_theory * self.endpoints_distance) for g in self.gaps)

    def as_chain(self) -> Chain:
        return Chain(self.rays, self.endpoints_distance, self.rho_empirical, self.N, self.gaps)

    def to_dict(self, generators=None):
        from .words import format_word

        fmt = (lambda w: format_word(w, generators)) if generators else (lambda w: list(w))
        return {
            "schema": "hypcayley.chain/1",
            "points": [fmt(r.word) for r in self.rays],
            "products_x2": list(self.products_x2),
            "s_x2": self.s_x2,
            "gaps": [float(f"{g:.12g}") for g in self.gaps],
            "endpoints_distance": float(f"{self.endpoints_distance:.12g}"),
            "rho_theory": float(f"{self.rho_theory:.12g}"),
            "rho_empirical": float(f"{self.rho_empirical:.12g}"),
            "N": self.N,
            "length": len(self.rays) - 1,
        }


def boundary_chain(
    ball: Ball, x: RayApprox, x2: RayApprox, params: BoundaryChainParams, window: Optional[int] = None
) -> BoundaryChain:
    """Chain of boundary points from x to x2 following the push-outward construction.

    Raises DisconnectedError (with ``stage``) when a ball-avoiding connection
    does not exist within the length budget.
    """
    vis, consts = params.visual, params.constants
    W = vis.window if window is None else window
    C, m, L = consts.C, params.m, consts.L
    if L is None:
        raise DisconnectedError("(‡) constant L is unbounded for this space", "constants")
    T = x.length
    s_x2 = boundary_gromov_product(ball, x, x2, W)
    s = s_x2 // 2
    if s - C + m + C + 1 > T:
        raise OutOfBallError(f"s={s} with m={m} needs rays longer than {T}")
    y, z = x.at(s), x2.at(s)
    first = avoid_ball_distance(ball, y, z, 0, s - C - 1, budget=L, visible_only=False)
    if not first.reachable:
        raise DisconnectedError(f"no path of length <= {L} joins c(s), c'(s) outside B(p, s - C) ({first.status})", "initial")
    alpha = list(first.path)
    path = alpha
    for i in range(m):
        try:
            path = list(push_path(ball, path, x.word, x2.word, s - C + i, consts).beta)
        except PushPathError as exc:
            raise DisconnectedError(f"push {i + 1} of {m} failed: {exc}", f"push{i + 1}") from exc
    rays = [x]
    for j, q in enumerate(path[1:-1], start=1):
        w, _ = near_ray(ball, q, C, T)
        rays.append(ray_from_word(ball, w, j))
    rays.append(x2)
    prods = tuple(boundary_gromov_product(ball, a, b, W) for a, b in zip(rays, rays[1:]))
    gaps = tuple(visual_distance(vis, p) for p in prods)
    dxx = visual_distance(vis, s_x2)
    lam = L
    N = lam**m * max(1, L)
    return BoundaryChain(
        tuple(rays), s_x2, prods, gaps, dxx, params.rho, max(gaps) / dxx, N, tuple(path), tuple(alpha)
    )
