"""Exact coarse geometry on balls: Gromov products, tripods, delta, extendability.

Half-integers are carried as doubled integers (fields ending in ``_x2``).
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from .cayley import Ball, distance_certified
from .errors import NotGeodesicError, OutOfBallError, UnsafeDistanceError
from .words import Word


@dataclass(frozen=True)
class GromovProduct:
    doubled_value: int
    basepoint: int = 0

    @property
    def value(self) -> Fraction:
        return Fraction(self.doubled_value, 2)


def gromov_product(dxp: int, dyp: int, dxy: int, basepoint: int = 0) -> GromovProduct:
    if min(dxp, dyp, dxy) < 0 or dxy > dxp + dyp or dxp > dyp + dxy or dyp > dxp + dxy:
        raise UnsafeDistanceError(f"triangle inequality fails for ({dxp}, {dyp}, {dxy})")
    return GromovProduct(dxp + dyp - dxy, basepoint)


@dataclass(frozen=True)
class TripodValues:
    a_x2: int
    b_x2: int
    c_x2: int
    dxy: int
    dxz: int
    dyz: int

    @property
    def abc(self):
        return tuple(Fraction(v, 2) for v in (self.a_x2, self.b_x2, self.c_x2))

    def identities_hold(self) -> bool:
        return (
            self.a_x2 + self.b_x2 == 2 * self.dxy
            and self.a_x2 + self.c_x2 == 2 * self.dxz
            and self.b_x2 + self.c_x2 == 2 * self.dyz
        )


def _safe(ball: Ball, u: int, v: int) -> int:
    cd = distance_certified(ball, u, v)
    if not cd.safe:
        raise UnsafeDistanceError(f"distance between {u} and {v} is not certified")
    return cd.value


def tripod_values(ball: Ball, x: int, y: int, z: int) -> TripodValues:
    dxy, dxz, dyz = _safe(ball, x, y), _safe(ball, x, z), _safe(ball, y, z)
    a = gromov_product(dxy, dxz, dyz, x).doubled_value
    b = gromov_product(dxy, dyz, dxz, y).doubled_value
    c = gromov_product(dxz, dyz, dxy, z).doubled_value
    return TripodValues(a, b, c, dxy, dxz, dyz)


# ------------------------------------------------------------------- delta
@dataclass(frozen=True)
class EnumerationPolicy:
    """Exhaustive below ``exhaustive_threshold`` safe vertices, else seeded sampling.

    The exhaustive four-point pass costs O(S^4) for S safe vertices, hence the
    modest default threshold.
    """

    exhaustive_threshold: int = 160
    samples: int = 200_000
    seed: int = 0
    force: Optional[str] = None  # "exhaustive" | "sampled" | None


@dataclass(frozen=True)
class HyperbolicityEstimate:
    delta_four_point_x2: int
    delta_thin_x2: int
    radius: int
    exhaustive: bool
    samples_tried: int
    region_size: int
    skipped_unsafe: int
    witnesses: Dict[str, List[int]] = field(default_factory=dict)

    @property
    def delta_four_point(self) -> Fraction:
        return Fraction(self.delta_four_point_x2, 2)

    @property
    def delta_thin(self) -> Fraction:
        return Fraction(self.delta_thin_x2, 2)

    def to_dict(self):
        return {
            "schema": "hypcayley.delta/1",
            "delta_four_point_x2": self.delta_four_point_x2,
            "delta_thin_x2": self.delta_thin_x2,
            "radius": self.radius,
            "exhaustive": self.exhaustive,
            "samples": self.samples_tried,
            "region_size": self.region_size,
            "skipped_unsafe": self.skipped_unsafe,
            "witnesses": self.witnesses,
        }


def safe_region(ball: Ball) -> np.ndarray:
    """Vertices within half the radius; every pair among them is certified."""
    return np.arange(ball.offsets[ball.radius // 2 + 1], dtype=np.int64)


def region_distance_matrix(ball: Ball, region: np.ndarray) -> np.ndarray:
    S = len(region)
    us = np.repeat(region, S)
    vs = np.tile(region, S)
    D = ball.group_distances(us, vs).reshape(S, S)
    if (D < 0).any():
        raise UnsafeDistanceError("region contains a pair outside the ball")
    return D


def four_point_exhaustive(D: np.ndarray):
    """Doubled max over (p,x,y,z) of min{(x|z)_p,(z|y)_p} - (x|y)_p, with a witness."""
    S = len(D)
    D = D.astype(np.int32)
    best, wit = 0, None
    chunk = max(1, (1 << 22) // max(1, S * S))
    for p in range(S):
        G = D[p][:, None] + D[p][None, :] - D
        for lo in range(0, S, chunk):
            blk = np.minimum(G[lo : lo + chunk, :, None], G[None, :, :])  # [x, z, y]
            mm = blk.max(axis=1)
            gap = mm - G[lo : lo + chunk]
            k = int(gap.argmax())
            val = int(gap.flat[k])
            if val > best:
                x, y = divmod(k, S)
                x += lo
                z = int(np.argmax(np.minimum(G[x], G[:, y])))
                best, wit = val, (p, x, y, z)
    return best, wit


def four_point_sampled(D: np.ndarray, count: int, seed: int):
    S = len(D)
    rng = np.random.default_rng(seed)
    q = rng.integers(0, S, size=(count, 4))
    p, x, y, z = q.T

    def g(a, b):
        return D[p, a] + D[p, b] - D[a, b]

    gap = np.minimum(g(x, z), g(z, y)) - g(x, y)
    k = int(gap.argmax())
    best = max(0, int(gap[k]))
    wit = tuple(int(t) for t in q[k]) if best > 0 else None
    return best, wit


def _thin_triangles(ball: Ball, region, D, triangles):
    """Doubled thin-triangle constant over triangles with shortlex geodesic sides."""
    S = len(region)
    diff = ball.difference_ids(np.repeat(region, S), np.tile(region, S)).reshape(S, S)
    side_cache = {}

    def side(i, j):
        key = (i, j)
        if key not in side_cache:
            side_cache[key] = ball.walk(int(region[i]), ball.word(int(diff[i, j])))
        return side_cache[key]

    us, vs = [], []
    for i, j, k in triangles:
        for a, b, c in ((i, j, k), (j, i, k), (k, i, j)):
            leg2 = int(D[a, b] + D[a, c] - D[b, c])
            s1, s2 = side(a, b), side(a, c)
            for t in range(leg2 // 2 + 1):
                us.append(s1[t])
                vs.append(s2[t])
    if not us:
        return 0, 0, None
    us = np.array(us, dtype=np.int64)
    vs = np.array(vs, dtype=np.int64)
    d = ball.group_distances(us, vs)
    ok = (d >= 0) & (ball.dist[us].astype(np.int64) + ball.dist[vs] + d <= 2 * ball.radius)
    skipped = int((~ok).sum())
    if not ok.any():
        return 0, skipped, None
    dd = np.where(ok, d, -1)
    k = int(dd.argmax())
    return 2 * int(dd[k]), skipped, [int(us[k]), int(vs[k])]


def delta_four_point(ball: Ball, policy: EnumerationPolicy = EnumerationPolicy()) -> HyperbolicityEstimate:
    region = safe_region(ball)
    S = len(region)
    D = region_distance_matrix(ball, region)
    exhaustive = policy.force == "exhaustive" or (policy.force is None and S <= policy.exhaustive_threshold)
    witnesses = {}
    if exhaustive:
        fp, wit = four_point_exhaustive(D)
        tried = S**4
        idx = np.arange(S)
        I, J, K = np.meshgrid(idx, idx, idx, indexing="ij")
        tri = np.stack([I.ravel(), J.ravel(), K.ravel()], 1)
        tri = tri[(tri[:, 0] < tri[:, 1]) & (tri[:, 1] < tri[:, 2])]
    else:
        fp, wit = four_point_sampled(D, policy.samples, policy.seed)
        tried = policy.samples
        rng = np.random.default_rng(policy.seed + 1)
        tri = rng.integers(0, S, size=(min(policy.samples, 20_000), 3))
    if wit is not None:
        witnesses["four_point"] = [int(region[t]) for t in wit]
    thin, skipped, twit = _thin_triangles(ball, region, D, tri.tolist())
    if twit is not None:
        witnesses["thin"] = twit
    return HyperbolicityEstimate(fp, thin, ball.radius, exhaustive, tried, S, skipped, witnesses)


# ------------------------------------------------------------- extendability
@dataclass(frozen=True)
class ExtendabilityEstimate:
    C: int
    radius: int
    margin: int
    witness: int

    def to_dict(self):
        return {"schema": "hypcayley.extend/1", **asdict(self)}


def multi_source_distance(ball: Ball, sources: np.ndarray) -> np.ndarray:
    """In-ball graph distance to the nearest source (-1 if unreachable)."""
    dist = np.full(ball.num_vertices, -1, dtype=np.int32)
    frontier = np.nonzero(sources)[0] if sources.dtype == bool else np.asarray(sources)
    dist[frontier] = 0
    d = 0
    adj = ball.adjacency
    while len(frontier):
        d += 1
        nb = adj[frontier].ravel()
        nb = np.unique(nb[nb >= 0])
        nb = nb[dist[nb] < 0]
        dist[nb] = d
        frontier = nb
    return dist


def extendability_constant(ball: Ball, margin: int = 0) -> ExtendabilityEstimate:
    R = ball.radius
    if R == 0:
        raise OutOfBallError("no maximal geodesic words in a radius-0 ball")
    if not 0 <= margin < R:
        raise ValueError("margin must satisfy 0 <= margin < R")
    dist = multi_source_distance(ball, ball.extendable(R))
    inner = np.arange(ball.offsets[R - margin + 1])
    vals = dist[inner]
    w = int(vals.argmax())
    return ExtendabilityEstimate(int(vals[w]), R, margin, w)


def extension_distances(ball: Ball) -> np.ndarray:
    return multi_source_distance(ball, ball.extendable(ball.radius))


# ----------------------------------------------------------------- tripod lemma
@dataclass(frozen=True)
class TripodLemmaReport:
    product_x2: int
    max_distance: int
    delta_x2: int
    distances: List[int]
    unsafe: int

    @property
    def passed(self) -> bool:
        return 2 * self.max_distance <= self.delta_x2


def geodesic_vertices(ball: Ball, c: Word) -> List[int]:
    path = ball.walk(0, c)
    if int(ball.dist[path[-1]]) != len(c):
        raise NotGeodesicError("word is not geodesic")
    return path


def tripod_lemma_check(ball: Ball, c: Word, c2: Word, delta_x2: int) -> TripodLemmaReport:
    if len(c) != len(c2):
        raise ValueError("words must have equal length")
    p1, p2 = geodesic_vertices(ball, c), geodesic_vertices(ball, c2)
    T = len(c)
    dT = int(ball.exact_distances([p1[-1]], [p2[-1]])[0])
    if dT < 0:
        raise UnsafeDistanceError("endpoint distance exceeds what the ball certifies")
    prod = gromov_product(T, T, dT).doubled_value
    ds = ball.exact_distances(p1[: prod // 2 + 1], p2[: prod // 2 + 1]).tolist()
    unsafe = sum(1 for d in ds if d < 0)
    return TripodLemmaReport(prod, max(ds), delta_x2, ds, unsafe)
