"""Boundary points as long geodesic words, windowed Gromov products, visual distances.

Products are doubled integers.  Since (c(t) | c'(t))_p is nondecreasing in t
for geodesic rays, the minimum over a tail window [R - W, R] is attained at
its left end.
"""

import csv
import io
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .cayley import Ball
from .errors import OutOfBallError, ResourceLimitError, UnsafeDistanceError
from .words import Word, column_letter


@dataclass(frozen=True)
class RayApprox:
    word: Word
    id: int
    vertices: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def endpoint(self) -> int:
        return self.vertices[-1]

    def at(self, t: int) -> int:
        return self.vertices[t]


@dataclass(frozen=True)
class VisualMetricParams:
    a: float
    delta_x2: int
    D_x2: int
    k1: float = 1.0
    k2: float = 1.0

    def __post_init__(self):
        if not self.a > 1:
            raise ValueError("visual parameter a must exceed 1")
        if self.D_x2 <= 2 * self.delta_x2:
            raise ValueError("D must exceed 2*delta")

    @property
    def k3(self) -> float:
        return self.k2 * self.a ** (self.D_x2 / 4 + 2 * self.delta_x2)

    @property
    def window(self) -> int:
        return self.delta_x2 + 1

    @classmethod
    def from_delta(cls, delta_x2: int, a: Optional[float] = None, D_x2: Optional[int] = None) -> "VisualMetricParams":
        if a is None:
            a = 2.0 ** (1.0 / (1.0 + 2.0 * delta_x2))
        if D_x2 is None:
            D_x2 = 2 * delta_x2 + 2
        return cls(a, delta_x2, D_x2)

    def to_dict(self):
        return {"a": self.a, "delta_x2": self.delta_x2, "D_x2": self.D_x2, "k1": self.k1, "k2": self.k2, "k3": self.k3}


# ---------------------------------------------------------------------- rays
def _ray(ball: Ball, v: int, rid: int) -> RayApprox:
    return RayApprox(ball.word(v), rid, tuple(ball.path_from_base(v)))


def ray_from_word(ball: Ball, w: Word, rid: int = 0) -> RayApprox:
    path = ball.walk(0, w)
    if int(ball.dist[path[-1]]) != len(w):
        raise UnsafeDistanceError("ray word is not geodesic")
    return RayApprox(tuple(w), rid, tuple(path))


def enumerate_rays(
    ball: Ball, r_max: int, policy: str = "one-per-endpoint", count: int = 256, seed: int = 0, limit: int = 200_000
) -> List[RayApprox]:
    """Geodesic words of length r_max from the basepoint.

    ``one-per-endpoint``: shortlex word to each sphere vertex, in id order.
    ``sample``: a seeded subset of those, kept in id order.
    ``all``: every geodesic word, shortlex order (capped by ``limit``).
    """
    if not 0 <= r_max <= ball.radius:
        raise OutOfBallError(f"R_max={r_max} exceeds ball radius {ball.radius}")
    ends = ball.sphere(r_max)
    if policy == "one-per-endpoint":
        return [_ray(ball, int(v), i) for i, v in enumerate(ends)]
    if policy == "sample":
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(ends), size=min(count, len(ends)), replace=False))
        return [_ray(ball, int(ends[j]), i) for i, j in enumerate(pick)]
    if policy == "all":
        out: List[RayApprox] = []
        stack = [((), (0,))]
        while stack:
            w, path = stack.pop()
            if len(w) == r_max:
                out.append(RayApprox(w, len(out), path))
                if len(out) > limit:
                    raise ResourceLimitError(f"more than {limit} geodesic words of length {r_max}")
                continue
            cur = path[-1]
            for col in range(ball.ncols - 1, -1, -1):
                u = int(ball.adjacency[cur, col])
                if u >= 0 and ball.dist[u] == len(w) + 1:
                    stack.append((w + (column_letter(col),), path + (u,)))
        return out
    raise ValueError(f"unknown ray policy {policy!r}")


def ray_matrix(rays: Sequence[RayApprox]) -> np.ndarray:
    return np.array([r.vertices for r in rays], dtype=np.int64)


# ------------------------------------------------------------------ products
def boundary_gromov_product(ball: Ball, c: RayApprox, c2: RayApprox, window: int = 1) -> int:
    """Doubled windowed product min_{t in [R-W, R]} (c(t) | c2(t))_p."""
    R = c.length
    if c2.length != R:
        raise ValueError("rays must have equal length")
    if c.vertices == c2.vertices:
        return 2 * R
    t = max(R - window, 0)
    d = int(ball.exact_distances([c.at(t)], [c2.at(t)])[0])
    if d < 0:
        raise UnsafeDistanceError(f"distance at t={t} is beyond what the ball certifies; shrink the window")
    return 2 * t - d


def products_at(ball: Ball, V: np.ndarray, I: np.ndarray, J: np.ndarray, t: int) -> np.ndarray:
    d = ball.exact_distances(V[I, t], V[J, t])
    if (d < 0).any():
        raise UnsafeDistanceError(f"some distance at t={t} is beyond what the ball certifies")
    return 2 * t - d


def pairwise_products(ball: Ball, rays: Sequence[RayApprox], window: int) -> np.ndarray:
    """Symmetric matrix of doubled windowed products (diagonal = 2R)."""
    V = ray_matrix(rays)
    n, R = len(rays), V.shape[1] - 1
    I, J = np.triu_indices(n, 1)
    P = np.full((n, n), 2 * R, dtype=np.int64)
    vals = products_at(ball, V, I, J, max(R - window, 0))
    same = (V[I] == V[J]).all(axis=1)
    vals[same] = 2 * R
    P[I, J] = vals
    P[J, I] = vals
    return P


def visual_distance(params: VisualMetricParams, product_x2: int) -> float:
    return params.a ** (-product_x2 / 2)


def distance_matrix_csv(rays: Sequence[RayApprox], P: np.ndarray, params: VisualMetricParams) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "product_x2", "visual"])
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            w.writerow([rays[i].id, rays[j].id, int(P[i, j]), f"{visual_distance(params, int(P[i, j])):.12g}"])
    return buf.getvalue()


# -------------------------------------------------------------- uniformity
@dataclass(frozen=True)
class UniformityReport:
    applicable: bool
    r: int
    product_x2: int
    value: float
    bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.value

    @property
    def passed(self) -> bool:
        return not self.applicable or self.value < self.bound


def uniformity_check(
    ball: Ball, params: VisualMetricParams, c: RayApprox, c2: RayApprox, r: int, window: Optional[int] = None
) -> UniformityReport:
    window = params.window if window is None else window
    if not 0 <= r <= c.length:
        raise ValueError("r must lie in 0..R_max")
    prod = boundary_gromov_product(ball, c, c2, window)
    d = int(ball.exact_distances([c.at(r)], [c2.at(r)])[0])
    applicable = 0 <= d and 2 * d < params.D_x2
    return UniformityReport(applicable, r, prod, visual_distance(params, prod), params.k3 * params.a ** (-r))


@dataclass(frozen=True)
class UniformityScan:
    pairs: int
    applicable: int
    violations: int
    min_margin: float
    worst: Optional[Tuple[int, int, int]]


def uniformity_scan(ball: Ball, params: VisualMetricParams, rays: Sequence[RayApprox], window=None) -> UniformityScan:
    """Check d_inf < k3 a^-r over every ray pair and every r where d(c(r), c'(r)) < D."""
    window = params.window if window is None else window
    V = ray_matrix(rays)
    n, R = len(rays), V.shape[1] - 1
    I, J = np.triu_indices(n, 1)
    prod = products_at(ball, V, I, J, max(R - window, 0))
    prod[(V[I] == V[J]).all(axis=1)] = 2 * R
    value = params.a ** (-prod / 2)
    applicable = violations = 0
    min_margin, worst = math.inf, None
    for r in range(R + 1):
        d = ball.group_distances(V[I, r], V[J, r])
        app = (d >= 0) & (2 * d < params.D_x2)
        bound = params.k3 * params.a ** (-r)
        applicable += int(app.sum())
        if app.any():
            margins = bound - value[app]
            violations += int((margins <= 0).sum())
            k = int(margins.argmin())
            if margins[k] < min_margin:
                idx = np.nonzero(app)[0][k]
                min_margin, worst = float(margins[k]), (int(I[idx]), int(J[idx]), r)
    return UniformityScan(len(I), applicable, violations, min_margin, worst)
