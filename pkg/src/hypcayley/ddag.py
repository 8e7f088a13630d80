"""Ball-avoiding paths: the (‡_M) test and outward path pushing.

Integer convention: the open ball B(p, r) is {w : d(p, w) < r}, so avoiding
"the ball of radius R - C" forbids exactly the vertices with d <= R - C - 1.

A path of length l between y and z never gets farther than
(d(p,y) + d(p,z) + l) / 2 from the basepoint, so inside a radius-Rb ball every
path of length <= 2*Rb - d(p,y) - d(p,z) is visible.  Searches are cut at that
depth; anything beyond it is reported as inconclusive rather than absent.
"""

import csv
import io
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cayley import Ball
from .errors import ForbiddenEndpointError, NotGeodesicError, OutOfBallError, PushPathError
from .words import Word, column_letter, letter_column

REACHABLE = "reachable"
UNREACHABLE = "unreachable"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DdagConstants:
    C: int
    M: int
    L: Optional[int]
    manual_M: bool = False

    @property
    def lam(self) -> Optional[int]:
        return self.L

    @classmethod
    def derive(cls, C: int, L: Optional[int] = None, M: Optional[int] = None) -> "DdagConstants":
        if M is None:
            return cls(C, 6 * C + 3, L, False)
        return cls(C, M, L, M != 6 * C + 3)

    def to_dict(self):
        return {"C": self.C, "M": self.M, "L": self.L, "lambda": self.lam, "manual_M": self.manual_M}


# ----------------------------------------------------------------- searches
def visibility_bound(ball: Ball, y: int, z: int) -> int:
    return 2 * ball.radius - int(ball.dist[y]) - int(ball.dist[z])


def _bfs(ball: Ball, source: int, allowed: Callable[[int], bool], depth: int, targets=None) -> Dict[int, int]:
    seen = {source: 0}
    frontier = [source]
    pending = None if targets is None else set(targets) - {source}
    adj = ball.adjacency
    d = 0
    while frontier and d < depth and (pending is None or pending):
        d += 1
        nxt = []
        for v in frontier:
            for u in adj[v].tolist():
                if u >= 0 and u not in seen and allowed(u):
                    seen[u] = d
                    nxt.append(u)
                    if pending is not None:
                        pending.discard(u)
        frontier = nxt
    return seen


def _bidirectional(ball: Ball, y: int, z: int, allowed, depth: int) -> Optional[List[int]]:
    """Shortest allowed y-z path of length <= depth, or None (deterministic tie-breaks)."""
    if y == z:
        return [y]
    adj = ball.adjacency
    par = [{y: -1}, {z: -1}]
    dep = [{y: 0}, {z: 0}]
    front = [[y], [z]]
    while front[0] and front[1] and dep[0][front[0][0]] + dep[1][front[1][0]] < depth:
        side = 0 if len(front[0]) <= len(front[1]) else 1
        mine, other = par[side], par[1 - side]
        k = dep[side][front[side][0]] + 1
        nxt, best = [], None
        for v in front[side]:
            for u in adj[v].tolist():
                if u < 0 or u in mine or not allowed(u):
                    continue
                mine[u] = v
                dep[side][u] = k
                nxt.append(u)
                if u in other:
                    tot = k + dep[1 - side][u]
                    if best is None or tot < best[0]:
                        best = (tot, u)
        front[side] = nxt
        if best is not None:
            if best[0] > depth:
                return None
            u = best[1]
            left, w = [], u
            while w != -1:
                left.append(w)
                w = par[0][w]
            right, w = [], par[1][u]
            while w != -1:
                right.append(w)
                w = par[1][w]
            return left[::-1] + right
    return None


def _array_bfs_path(ball: Ball, y: int, z: int, forbid_radius: int, depth: int) -> Optional[List[int]]:
    """Vectorised shortest path avoiding d(p, .) <= forbid_radius, for long searches."""
    V = ball.num_vertices
    parent = np.full(V, -2, dtype=np.int64)
    parent[y] = -1
    frontier = np.array([y], dtype=np.int64)
    dist = ball.dist
    for _ in range(depth):
        nb = ball.adjacency[frontier]  # frontier-major, column-minor order
        src = np.repeat(frontier, nb.shape[1])
        nb = nb.ravel().astype(np.int64)
        ok = nb >= 0
        ok[ok] = (dist[nb[ok]] > forbid_radius) & (parent[nb[ok]] == -2)
        nb, src = nb[ok], src[ok]
        if len(nb) == 0:
            return None
        uniq, first = np.unique(nb, return_index=True)
        order = np.sort(first)
        frontier = nb[order]
        parent[frontier] = src[order]
        if parent[z] != -2:
            path = [z]
            while path[-1] != y:
                path.append(int(parent[path[-1]]))
            return path[::-1]
    return None


def _array_bfs_dists(ball: Ball, y: int, forbid_radius: int, depth: int, targets) -> Dict[int, int]:
    """Vectorised multi-target BFS distances from y avoiding d(p, .) <= forbid_radius."""
    seen = np.zeros(ball.num_vertices, dtype=bool)
    seen[y] = True
    targets = np.asarray(sorted(set(targets)), dtype=np.int64)
    found = {y: 0} if y in set(targets.tolist()) else {}
    frontier = np.array([y], dtype=np.int64)
    dist = ball.dist
    for d in range(1, depth + 1):
        nb = ball.adjacency[frontier].ravel().astype(np.int64)
        nb = np.unique(nb[nb >= 0])
        nb = nb[(dist[nb] > forbid_radius) & ~seen[nb]]
        if len(nb) == 0:
            break
        seen[nb] = True
        frontier = nb
        for t in targets[seen[targets]].tolist():
            found.setdefault(t, d)
        if len(found) == len(targets):
            break
    return found


def find_path(ball: Ball, y: int, z: int, center: int, forbid_radius: int, depth: int) -> Optional[List[int]]:
    """Shortest allowed path of length <= depth, trying a cheap short search first."""
    dc = center_distances(ball, center)
    allowed = lambda w: dc(w) > forbid_radius
    short = min(depth, 6)
    path = _bidirectional(ball, y, z, allowed, short)
    if path is not None or depth <= short:
        return path
    if center == 0:
        return _array_bfs_path(ball, y, z, forbid_radius, depth)
    return _bidirectional(ball, y, z, allowed, depth)


def center_distances(ball: Ball, center: int) -> Callable[[int], int]:
    """Exact d(center, w) for ball vertices; returns a large value beyond the ball."""
    if center == 0:
        dist = ball.dist
        return lambda w: int(dist[w])
    cache: Dict[int, int] = {}
    far = 1 << 30

    def f(w):
        if w not in cache:
            t = int(ball.difference_ids([center], [w])[0])
            cache[w] = far if t < 0 else int(ball.dist[t])
        return cache[w]

    return f


@dataclass(frozen=True)
class AvoidanceResult:
    status: str
    length: Optional[int]
    path: Tuple[int, ...]
    visible_bound: int

    @property
    def reachable(self) -> bool:
        return self.status == REACHABLE


def avoid_ball_distance(
    ball: Ball,
    y: int,
    z: int,
    center: int = 0,
    forbid_radius: int = 0,
    budget: Optional[int] = None,
    visible_only: bool = True,
) -> AvoidanceResult:
    """Shortest y-z path avoiding {w : d(center, w) <= forbid_radius}.

    With ``visible_only`` the search stops at the visibility bound, so a
    returned length is the true shortest length in the whole graph.  Without
    it the search runs to ``budget`` inside the ball: any path found is still
    a genuine allowed path, but possibly not a shortest one.

    ``unreachable`` means no allowed path of length <= budget exists (certified
    only up to the visibility bound); otherwise the status is ``inconclusive``.
    """
    dc = center_distances(ball, center)
    if dc(y) <= forbid_radius or dc(z) <= forbid_radius:
        raise ForbiddenEndpointError("endpoint lies in the forbidden ball")
    bound = visibility_bound(ball, y, z)
    if budget is None:
        depth = bound
    else:
        depth = min(budget, bound) if visible_only else budget
    path = find_path(ball, y, z, center, forbid_radius, max(depth, 0))
    if path is not None:
        return AvoidanceResult(REACHABLE, len(path) - 1, tuple(path), bound)
    status = UNREACHABLE if budget is None or budget <= bound else INCONCLUSIVE
    return AvoidanceResult(status, None, (), bound)


# ------------------------------------------------------------------ (‡_M)
@dataclass(frozen=True)
class DdagRow:
    R: int
    maxL: Optional[int]
    witness: Optional[Tuple[int, int, int]]
    reachable: int
    unreachable: int
    inconclusive: int


@dataclass(frozen=True)
class DdagReport:
    constants: DdagConstants
    rows: Tuple[DdagRow, ...]
    verdict: str
    budget: int
    ball_radius: int
    exact: bool = True

    def table(self) -> Dict[int, Optional[int]]:
        return {row.R: row.maxL for row in self.rows}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["R", "maxL", "reachable", "unreachable", "inconclusive"])
        for r in self.rows:
            shown = r.maxL if r.maxL is not None else ("unbounded" if r.unreachable else "unknown")
            w.writerow([r.R, shown, r.reachable, r.unreachable, r.inconclusive])
        return buf.getvalue()

    def to_dict(self):
        return {
            "schema": "hypcayley.ddag/1",
            "constants": self.constants.to_dict(),
            "budget": self.budget,
            "ball_radius": self.ball_radius,
            "exact": self.exact,
            "verdict": self.verdict,
            "rows": [
                {
                    "R": r.R,
                    "maxL": r.maxL,
                    "witness": None if r.witness is None else list(r.witness),
                    "reachable": r.reachable,
                    "unreachable": r.unreachable,
                    "inconclusive": r.inconclusive,
                }
                for r in self.rows
            ],
        }


def qualified_pairs(ball: Ball, R: int, M: int, center: int = 0) -> List[Tuple[int, int]]:
    """Unordered pairs y < z with d(center,y) = d(center,z) = R and 1 <= d(y,z) <= M."""
    if center == 0:
        ys = ball.sphere(R)
    else:
        ys = ball.product_ids(np.full(len(ball.sphere(R)), center), ball.sphere(R))
        if (ys < 0).any():
            raise OutOfBallError("translated sphere leaves the ball")
    steps = np.arange(1, ball.offsets[min(M, ball.radius) + 1], dtype=np.int64)
    on_sphere = set(ys.tolist())
    out = []
    for y in ys.tolist():
        zs = ball.product_ids(np.full(len(steps), y), steps)
        for z in zs.tolist():
            if z > y and z in on_sphere:
                out.append((y, z))
    out.sort()
    return out


def _verdict(rows: Sequence[DdagRow]) -> str:
    if any(r.unreachable for r in rows):
        return "disconnected"
    if any(r.inconclusive for r in rows):
        return INCONCLUSIVE
    vals = [r.maxL for r in rows if r.maxL is not None]
    top = vals[len(vals) // 2 :]
    if len(top) >= 2 and all(a < b for a, b in zip(top, top[1:])):
        return "growing"
    return "bounded"


def test_ddag(
    ball: Ball,
    M: Optional[int],
    C: int,
    r_min: int,
    r_max: int,
    budget: Optional[int] = None,
    centers: Sequence[int] = (0,),
    visible_only: bool = True,
) -> DdagReport:
    """Tabulate the worst avoidance length L(R) over qualified triples (x, y, z).

    ``budget`` caps the searched length (default 4*M).  ``centers`` lists the
    vertices x used as triple anchors; 0 is the basepoint.  With
    ``visible_only=False`` searches run to the budget inside the ball and maxL
    becomes an upper bound on the true L(R) instead of its exact value.
    """
    consts = DdagConstants.derive(C, None, M)
    M = consts.M
    budget = 4 * M if budget is None else budget
    if r_max >= ball.radius or r_min < 1 or r_min > r_max:
        raise OutOfBallError(f"range {r_min}..{r_max} does not fit inside a radius-{ball.radius} ball")
    rows = []
    for R in range(r_min, r_max + 1):
        forbid = R - C - 1
        best, wit, cut, open_ = None, None, None, None
        counts = {REACHABLE: 0, UNREACHABLE: 0, INCONCLUSIVE: 0}
        for x in centers:
            dc = center_distances(ball, x)
            allowed = lambda w, dc=dc: dc(w) > forbid
            by_y: Dict[int, List[int]] = {}
            for y, z in qualified_pairs(ball, R, M, x):
                by_y.setdefault(y, []).append(z)
            for y, zs in by_y.items():
                if visible_only:
                    depth = min(budget, max(visibility_bound(ball, y, z) for z in zs))
                else:
                    depth = budget
                if x == 0 and depth > 6:
                    seen = _array_bfs_dists(ball, y, forbid, depth, zs)
                else:
                    seen = _bfs(ball, y, allowed, depth, targets=zs)
                for z in zs:
                    bound = visibility_bound(ball, y, z)
                    if z in seen and (seen[z] <= bound or not visible_only):
                        counts[REACHABLE] += 1
                        if best is None or seen[z] > best:
                            best, wit = seen[z], (x, y, z)
                    elif budget <= bound:
                        counts[UNREACHABLE] += 1
                        cut = cut or (x, y, z)
                    else:
                        counts[INCONCLUSIVE] += 1
                        open_ = open_ or (x, y, z)
        # any unresolved triple leaves the maximum undetermined
        maxL = None if counts[UNREACHABLE] or counts[INCONCLUSIVE] else best
        wit = cut or open_ or wit
        rows.append(DdagRow(R, maxL, wit, counts[REACHABLE], counts[UNREACHABLE], counts[INCONCLUSIVE]))
    verdict = _verdict(rows)
    L = max((r.maxL for r in rows), default=None) if verdict in ("bounded", "growing") else None
    return DdagReport(replace(consts, L=L), tuple(rows), verdict, budget, ball.radius, visible_only)


test_ddag.__test__ = False  # keep pytest from collecting it


# -------------------------------------------------------------- path pushing
def ray_vertices(ball: Ball, c: Word) -> List[int]:
    path = ball.walk(0, c)
    if int(ball.dist[path[-1]]) != len(c):
        raise NotGeodesicError("ray word is not geodesic")
    return path


def extend_shortlex(ball: Ball, v: int, length: int) -> Word:
    """Shortlex-least geodesic word of the given length whose image passes through v."""
    ext = ball.extendable(length)
    if not ext[v]:
        raise OutOfBallError("vertex does not extend to the requested radius")
    w = list(ball.word(v))
    cur = v
    while len(w) < length:
        for col in range(ball.ncols):
            u = int(ball.adjacency[cur, col])
            if u >= 0 and ball.dist[u] == ball.dist[cur] + 1 and ext[u]:
                w.append(column_letter(col))
                cur = u
                break
    return tuple(w)


def near_ray(ball: Ball, q: int, C: int, length: int) -> Tuple[Word, int]:
    """Shortlex-least ray (geodesic word of given length) passing within C of q.

    Returns the word and the vertex y on it closest to q (first such, by ray order).
    """
    ext = ball.extendable(length)
    near = ball.bfs_distances(q, max_depth=C)
    cands = sorted((v for v in near if ext[v] and ball.dist[v] <= length), key=lambda v: v)
    if not cands:
        raise OutOfBallError(f"no ray of length {length} passes within {C} of vertex {q}")
    best = min((extend_shortlex(ball, v, length) for v in cands), key=lambda w: (len(w), [letter_column(x) for x in w]))
    path = ball.walk(0, best)
    y = min((v for v in path if v in near), key=lambda v: (near[v], ball.dist[v]))
    return best, y


@dataclass(frozen=True)
class PushResult:
    beta: Tuple[int, ...]
    rays: Tuple[Word, ...]
    z: Tuple[int, ...]
    segment_lengths: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.beta) - 1


def _check_unit_steps(ball: Ball, alpha: Sequence[int]):
    for j in range(1, len(alpha)):
        a, b = alpha[j - 1], alpha[j]
        if a != b and b not in ball.adjacency[a].tolist():
            raise PushPathError(f"alpha is not unit-step at index {j}", j)


def push_path(
    ball: Ball,
    alpha: Sequence[int],
    c: Word,
    c2: Word,
    r: int,
    constants: DdagConstants,
    p: int = 0,
) -> PushResult:
    """Push a path outside B(p, r) joining rays c, c2 to one outside B(p, r+1).

    Rays are geodesic words from the basepoint; alpha[0] must lie on c and
    alpha[-1] on c2.  Each segment is an allowed path of length <= L between
    consecutive anchor points z_j chosen on near-rays beyond radius r + C + 1.
    """
    if p != 0:
        raise ValueError("paths are pushed relative to the basepoint 0")
    if constants.L is None:
        raise PushPathError("L is unbounded; nothing to push with", -1)
    alpha = [int(v) for v in alpha]
    if not alpha:
        raise PushPathError("empty path", 0)
    _check_unit_steps(ball, alpha)
    for j, v in enumerate(alpha):
        if ball.dist[v] < r:
            raise PushPathError(f"alpha enters B(p, {r}) at index {j}", j)
    if len(c) != len(c2):
        raise ValueError("rays must have equal length")
    C, L, T = constants.C, constants.L, len(c)
    rc, rc2 = ray_vertices(ball, c), ray_vertices(ball, c2)
    if alpha[0] not in rc or alpha[-1] not in rc2:
        raise PushPathError("alpha endpoints are not on the designated rays", 0)
    if len(alpha) == 1 and tuple(c) != tuple(c2):
        alpha = alpha * 2
    ell = len(alpha) - 1
    rays: List[Word] = []
    ys: List[int] = []
    for j, q in enumerate(alpha):
        if j == 0:
            rays.append(tuple(c)); ys.append(q)
        elif j == ell:
            rays.append(tuple(c2)); ys.append(q)
        else:
            w, y = near_ray(ball, q, C, T)
            rays.append(w); ys.append(y)
    zs = []
    for j, (w, y) in enumerate(zip(rays, ys)):
        t = max(int(ball.dist[y]), r + C + 1)
        if t > T:
            raise PushPathError(f"ray {j} is too short to reach radius {t}", j)
        zs.append(ball.walk(0, w[:t])[-1])
    beta = [zs[0]]
    seglens = []
    for j in range(1, len(zs)):
        res = avoid_ball_distance(ball, zs[j - 1], zs[j], 0, r, budget=L, visible_only=False)
        if not res.reachable:
            raise PushPathError(f"no allowed path of length <= {L} for segment {j} ({res.status})", j)
        beta.extend(res.path[1:])
        seglens.append(res.length)
    return PushResult(tuple(beta), tuple(rays), tuple(zs), tuple(seglens))


def push_iterate(ball: Ball, alpha, c: Word, c2: Word, r: int, m: int, constants: DdagConstants) -> List[PushResult]:
    out = []
    cur = list(alpha)
    for k in range(m):
        res = push_path(ball, cur, c, c2, r + k, constants)
        out.append(res)
        cur = list(res.beta)
    return out
