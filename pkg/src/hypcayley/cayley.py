"""Finite balls in Cayley graphs.

Vertices are numbered breadth-first, shortlex within each sphere, so vertex 0
is the identity and ``ball.word(v)`` is the shortlex-least geodesic word for v.
Adjacency is a (V, 2n) int32 array indexed by letter column; -1 marks a
neighbour outside the ball (only possible on the outer sphere).
"""

import json
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional

import numpy as np

from .backends import Backend, abelian_invariant, abelian_invariant_basis, normal_form, words_equal
from .codecs import codec_for, row_hash
from .errors import OutOfBallError, ResourceLimitError
from .words import Word, column_letter, format_word, inverse, letter_column

DEFAULT_MAX_VERTICES = 5_000_000
CHUNK = 1 << 19


def default_max_vertices() -> int:
    return int(os.environ.get("HYPCAYLEY_MAX_VERTICES", DEFAULT_MAX_VERTICES))


@dataclass(frozen=True)
class CertifiedDistance:
    value: int
    safe: bool


class Ball:
    """Immutable breadth-first ball of a Cayley graph around the identity."""

    def __init__(self, backend, radius, dist, adjacency, parent, parent_col, offsets, codec=None, rows=None, words=None):
        self.backend = backend
        self.radius = radius
        self.dist = dist
        self.adjacency = adjacency
        self.parent = parent
        self.parent_col = parent_col
        self.offsets = offsets
        self.codec = codec
        self.rows = rows
        self._words = words
        for arr in (dist, adjacency, parent, parent_col):
            arr.setflags(write=False)
        if codec is not None:
            h = row_hash(rows)
            order = np.argsort(h, kind="stable")
            self._sorted_hash = h[order]
            self._sorted_ids = order.astype(np.int32)
        else:
            self._buckets: Dict[tuple, List[int]] = {}
            basis = self._basis
            n = backend.presentation.rank
            for v, w in enumerate(words):
                self._buckets.setdefault(self._bucket_key(w, basis, n), []).append(v)

    # ------------------------------------------------------------------ basics
    @property
    def presentation(self):
        return self.backend.presentation

    @property
    def num_vertices(self) -> int:
        return len(self.dist)

    @property
    def ncols(self) -> int:
        return self.adjacency.shape[1]

    def sphere(self, r: int) -> np.ndarray:
        if not 0 <= r <= self.radius:
            raise OutOfBallError(f"sphere radius {r} outside 0..{self.radius}")
        return np.arange(self.offsets[r], self.offsets[r + 1], dtype=np.int64)

    def sphere_sizes(self) -> List[int]:
        return [self.offsets[r + 1] - self.offsets[r] for r in range(self.radius + 1)]

    def word(self, v: int) -> Word:
        letters = []
        v = int(v)
        while v != 0:
            letters.append(column_letter(int(self.parent_col[v])))
            v = int(self.parent[v])
        return tuple(reversed(letters))

    def path_from_base(self, v: int) -> List[int]:
        out = [int(v)]
        while out[-1] != 0:
            out.append(int(self.parent[out[-1]]))
        return out[::-1]

    def neighbor(self, v: int, letter: int) -> int:
        return int(self.adjacency[v, letter_column(letter)])

    def neighbors(self, v: int) -> List[int]:
        return [u for u in self.adjacency[v].tolist() if u >= 0]

    def walk(self, start: int, w: Word) -> List[int]:
        """Vertices visited by reading ``w`` from ``start``; raises if it leaves the ball."""
        out = [int(start)]
        for x in w:
            nxt = int(self.adjacency[out[-1], letter_column(x)])
            if nxt < 0:
                raise OutOfBallError("walk leaves the ball")
            out.append(nxt)
        return out

    def format(self, v: int) -> str:
        return format_word(self.word(v), self.presentation.generators)

    # ---------------------------------------------------------------- lookups
    @cached_property
    def _basis(self):
        return abelian_invariant_basis(self.presentation)

    @staticmethod
    def _bucket_key(w, basis, n):
        return abelian_invariant(basis, n, w)

    def _lookup_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(rows)
        h = row_hash(rows)
        pos = np.searchsorted(self._sorted_hash, h)
        pos = np.minimum(pos, len(self._sorted_hash) - 1)
        ids = self._sorted_ids[pos].astype(np.int64)
        hit = self._sorted_hash[pos] == h
        hit &= np.all(self.rows[ids] == rows, axis=1)
        return np.where(hit, ids, -1)

    def locate_word(self, w: Word) -> Optional[int]:
        """Vertex id of the element represented by ``w``, or None if outside the ball."""
        if self.codec is not None:
            v = int(self._lookup_rows(self.codec.element(w))[0])
            return None if v < 0 else v
        n = self.presentation.rank
        for v in self._buckets.get(self._bucket_key(w, self._basis, n), ()):
            if words_equal(self.backend, w, self._words[v]):
                return v
        return None

    def difference_ids(self, us, vs) -> np.ndarray:
        """Ids of u^-1 v for paired arrays of vertices (-1 when outside the ball)."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if self.codec is not None:
            out = np.empty(len(us), dtype=np.int64)
            for lo in range(0, len(us), CHUNK):
                sl = slice(lo, lo + CHUNK)
                rows = self.codec.mul(self.codec.inv(self.rows[us[sl]]), self.rows[vs[sl]])
                out[sl] = self._lookup_rows(rows)
            return out
        res = []
        for u, v in zip(us.tolist(), vs.tolist()):
            t = self.locate_word(inverse(self._words[u]) + self._words[v])
            res.append(-1 if t is None else t)
        return np.array(res, dtype=np.int64)

    def product_ids(self, us, ws) -> np.ndarray:
        """Ids of u*w for paired arrays of vertices (-1 when outside the ball)."""
        us = np.asarray(us, dtype=np.int64)
        ws = np.asarray(ws, dtype=np.int64)
        if self.codec is not None:
            out = np.empty(len(us), dtype=np.int64)
            for lo in range(0, len(us), CHUNK):
                sl = slice(lo, lo + CHUNK)
                out[sl] = self._lookup_rows(self.codec.mul(self.rows[us[sl]], self.rows[ws[sl]]))
            return out
        res = []
        for u, w in zip(us.tolist(), ws.tolist()):
            t = self.locate_word(self._words[u] + self._words[w])
            res.append(-1 if t is None else t)
        return np.array(res, dtype=np.int64)

    def group_distance(self, u: int, v: int) -> Optional[int]:
        """Exact word-metric distance when it is at most the radius, else None."""
        if u == v:
            return 0
        t = int(self.difference_ids([u], [v])[0])
        return None if t < 0 else int(self.dist[t])

    def group_distances(self, us, vs) -> np.ndarray:
        t = self.difference_ids(us, vs)
        out = np.full(len(t), -1, dtype=np.int64)
        ok = t >= 0
        out[ok] = self.dist[t[ok]]
        return out

    def exact_distances(self, us, vs, max_len: Optional[int] = None) -> np.ndarray:
        """Word-metric distances up to ``max_len`` (default 2R); -1 beyond.

        For g = u^-1 v outside the ball, the first k with some h in sphere k and
        h^-1 g inside the ball gives |g| = k + R exactly.
        """
        out = self.group_distances(us, vs)
        max_len = 2 * self.radius if max_len is None else max_len
        todo = np.nonzero(out < 0)[0]
        if len(todo) == 0 or self.codec is None or max_len <= self.radius:
            return out
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        g = self.codec.mul(self.codec.inv(self.rows[us[todo]]), self.rows[vs[todo]])
        pending = np.arange(len(todo))
        # |g| <= |u| + |v|; no hit below k forces |g| >= k + R
        upper = self.dist[us[todo]].astype(np.int64) + self.dist[vs[todo]]
        for k in range(1, min(max_len - self.radius, self.radius) + 1):
            done = upper[pending] <= k + self.radius
            out[todo[pending[done]]] = upper[pending[done]]
            pending = pending[~done]
            if not len(pending):
                break
            hinv = self.codec.inv(self.rows[self.sphere(k)])
            step = max(1, CHUNK // len(hinv))
            found = np.zeros(len(pending), dtype=bool)
            for lo in range(0, len(pending), step):
                idx = pending[lo : lo + step]
                prod = self.codec.mul(np.repeat(hinv[None], len(idx), 0).reshape(-1, hinv.shape[1]),
                                      np.repeat(g[idx], len(hinv), 0))
                ids = self._lookup_rows(prod).reshape(len(idx), len(hinv))
                found[lo : lo + step] = (ids >= 0).any(axis=1)
            # the first k with a hit has |h^-1 g| = R exactly, so |g| = k + R
            out[todo[pending[found]]] = k + self.radius
            pending = pending[~found]
            if not len(pending):
                break
        return out

    def translate(self, u: int, w: Word) -> Optional[int]:
        """Vertex u*w located by group multiplication (not by walking)."""
        if self.codec is not None:
            row = self.codec.mul(self.rows[u], self.codec.element(w))
            v = int(self._lookup_rows(row)[0])
            return None if v < 0 else v
        return self.locate_word(self._words[u] + tuple(w))

    # ------------------------------------------------------------ in-ball BFS
    def bfs_distances(self, source: int, allowed=None, max_depth=None) -> Dict[int, int]:
        seen = {int(source): 0}
        frontier = [int(source)]
        depth = 0
        adj = self.adjacency
        while frontier and (max_depth is None or depth < max_depth):
            depth += 1
            nxt = []
            for v in frontier:
                for u in adj[v].tolist():
                    if u >= 0 and u not in seen and (allowed is None or allowed(u)):
                        seen[u] = depth
                        nxt.append(u)
            frontier = nxt
        return seen

    def inball_distance(self, u: int, v: int) -> Optional[int]:
        return self.bfs_distances(u).get(int(v))

    def verify_identifications(self) -> int:
        """Exactly re-check every edge with the backend normal form; returns edges checked."""
        checked = 0
        V = self.num_vertices
        words = [self.word(v) for v in range(V)]
        for v in range(V):
            for col, u in enumerate(self.adjacency[v].tolist()):
                if u < 0:
                    continue
                w = inverse(words[u]) + words[v] + (column_letter(col),)
                if normal_form(self.backend, w):
                    raise AssertionError(f"edge {v}-{col}->{u} is not a group relation")
                checked += 1
        return checked

    @cached_property
    def extendable_to(self):
        return {}

    def extendable(self, r_max: Optional[int] = None) -> np.ndarray:
        """Mask of vertices lying on some geodesic from the identity to sphere r_max."""
        r_max = self.radius if r_max is None else r_max
        cache = self.extendable_to
        if r_max not in cache:
            ext = np.zeros(self.num_vertices, dtype=bool)
            ext[self.offsets[r_max] : self.offsets[r_max + 1]] = True
            for r in range(r_max - 1, -1, -1):
                ids = np.arange(self.offsets[r], self.offsets[r + 1])
                nb = self.adjacency[ids]
                safe_nb = np.where(nb >= 0, nb, 0)
                good = (nb >= 0) & (self.dist[safe_nb] == r + 1) & ext[safe_nb]
                ext[ids] = good.any(axis=1)
            cache[r_max] = ext
        return cache[r_max]

    # ----------------------------------------------------------------- export
    def to_csv(self) -> str:
        pres = self.presentation
        cols = [format_word((column_letter(c),), pres.generators) for c in range(self.ncols)]
        lines = ["id,dist," + ",".join("n_" + c for c in cols)]
        for v in range(self.num_vertices):
            lines.append(f"{v},{int(self.dist[v])}," + ",".join(str(u) for u in self.adjacency[v].tolist()))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        pres = self.presentation
        doc = {
            "schema": "hypcayley.ball/1",
            "generators": list(pres.generators),
            "backend": self.backend.kind,
            "radius": self.radius,
            "vertices": [
                {"id": v, "dist": int(self.dist[v]), "word": self.format(v)} for v in range(self.num_vertices)
            ],
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"


# ---------------------------------------------------------------------- build
def build_ball(backend: Backend, radius: int, max_vertices: Optional[int] = None) -> Ball:
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    cap = default_max_vertices() if max_vertices is None else max_vertices
    codec = codec_for(backend)
    if codec is not None:
        return _build_vectorised(backend, codec, radius, cap)
    return _build_exact(backend, radius, cap)


def _build_vectorised(backend, codec, R, cap) -> Ball:
    ncols = 2 * backend.presentation.rank
    bipartite = _bipartite(backend)
    rows = [codec.identity()[None, :]]
    hashes = [row_hash(rows[0])]
    parents = [np.array([-1], dtype=np.int32)]
    pcols = [np.array([-1], dtype=np.int8)]
    adj_blocks = []
    offsets = [0, 1]
    for r in range(R + 1):
        lo, hi = offsets[r], offsets[r + 1]
        if r == R and bipartite and R > 0:
            adj_blocks.append(_outer_by_symmetry(adj_blocks[-1], offsets, R, ncols))
            break
        # lookup table over spheres r-1 and r
        plo = offsets[max(r - 1, 0)]
        known_rows = np.concatenate(rows[max(r - 1, 0) :])
        known_hash = np.concatenate(hashes[max(r - 1, 0) :])
        order = np.argsort(known_hash, kind="stable")
        khash = known_hash[order]
        kids = order + plo
        cur_rows = rows[r]
        adj = np.full((hi - lo, ncols), -1, dtype=np.int32)
        new_hash, new_cand = [], []
        for clo in range(0, hi - lo, CHUNK // ncols):
            block = cur_rows[clo : clo + CHUNK // ncols]
            cand = np.stack([codec.act(block, c) for c in range(ncols)], axis=1).reshape(-1, codec.width)
            h = row_hash(cand)
            pos = np.minimum(np.searchsorted(khash, h), len(khash) - 1)
            hit = khash[pos] == h
            ids = kids[pos]
            hit &= np.all(known_rows[ids - plo] == cand, axis=1)
            flat = adj[clo : clo + len(block)].reshape(-1)
            flat[hit] = ids[hit]
            if r < R:
                miss = np.nonzero(~hit)[0]
                new_hash.append(h[miss])
                new_cand.append(miss + clo * ncols)
        if r == R:
            adj_blocks.append(adj)
            break
        nh = np.concatenate(new_hash) if new_hash else np.zeros(0, np.int64)
        nc = np.concatenate(new_cand) if new_cand else np.zeros(0, np.int64)
        uniq, first, inv = np.unique(nh, return_index=True, return_inverse=True)
        # ids in order of first discovery == shortlex order within the sphere
        rank = np.empty(len(uniq), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
        count = len(uniq)
        if offsets[-1] + count > cap:
            raise ResourceLimitError(f"ball exceeds {cap} vertices at radius {r + 1}")
        first_cand = nc[np.sort(first)]
        par_local = first_cand // ncols
        par_col = first_cand % ncols
        new_rows = np.empty((count, codec.width), dtype=np.int64)
        for c in range(ncols):
            m = par_col == c
            if m.any():
                new_rows[m] = codec.act(cur_rows[par_local[m]], c)
        # every candidate sharing a hash must be the same element
        assigned = rank[inv]
        for clo in range(0, len(nc), CHUNK):
            sl = slice(clo, clo + CHUNK)
            cl = nc[sl]
            cand = np.empty((len(cl), codec.width), dtype=np.int64)
            for c in range(ncols):
                m = cl % ncols == c
                if m.any():
                    cand[m] = codec.act(cur_rows[cl[m] // ncols], c)
            if not np.array_equal(cand, new_rows[assigned[sl]]):
                raise RuntimeError("64-bit hash collision between distinct elements")
        flat = adj.reshape(-1)
        flat[nc] = offsets[-1] + assigned
        adj_blocks.append(adj)
        rows.append(new_rows)
        hashes.append(row_hash(new_rows))
        parents.append((par_local + lo).astype(np.int32))
        pcols.append(par_col.astype(np.int8))
        offsets.append(offsets[-1] + count)
    dist = np.concatenate([np.full(offsets[r + 1] - offsets[r], r, dtype=np.int16) for r in range(R + 1)])
    return Ball(
        backend,
        R,
        dist,
        np.concatenate(adj_blocks),
        np.concatenate(parents),
        np.concatenate(pcols),
        offsets,
        codec=codec,
        rows=np.concatenate(rows),
    )


def _bipartite(backend) -> bool:
    # even relators and parity-preserving rules give no odd cycles
    pres = backend.presentation
    return all(len(r) % 2 == 0 for r in pres.relators) and all(
        (len(l) - len(r)) % 2 == 0 for l, r in backend.rules
    )


def _outer_by_symmetry(prev_adj, offsets, R, ncols):
    # outer sphere of a bipartite graph: every edge points back to sphere R-1
    lo = offsets[R]
    out = np.full((offsets[R + 1] - lo, ncols), -1, dtype=np.int32)
    u_local, cols = np.nonzero(prev_adj >= lo)
    v = prev_adj[u_local, cols] - lo
    out[v, cols ^ 1] = u_local + offsets[R - 1]
    return out


def _build_exact(backend, R, cap) -> Ball:
    """BFS identifying vertices with exact backend equality inside abelian-invariant buckets."""
    pres = backend.presentation
    ncols = 2 * pres.rank
    basis = abelian_invariant_basis(pres)
    n = pres.rank
    words: List[Word] = [()]
    buckets: Dict[tuple, List[int]] = {Ball._bucket_key((), basis, n): [0]}
    dist = [0]
    parent, pcol = [-1], [-1]
    adj = [[-1] * ncols]
    offsets = [0, 1]

    def find(w, lo):
        for v in buckets.get(Ball._bucket_key(w, basis, n), ()):
            if v >= lo and words_equal(backend, w, words[v]):
                return v
        return None

    for r in range(R + 1):
        lo, hi = offsets[r], offsets[r + 1]
        search_lo = offsets[max(r - 1, 0)]
        for v in range(lo, hi):
            for c in range(ncols):
                w = words[v] + (column_letter(c),)
                u = find(w, search_lo)
                if u is None and r < R:
                    u = len(words)
                    if u + 1 > cap:
                        raise ResourceLimitError(f"ball exceeds {cap} vertices at radius {r + 1}")
                    words.append(w)
                    buckets.setdefault(Ball._bucket_key(w, basis, n), []).append(u)
                    dist.append(r + 1)
                    parent.append(v)
                    pcol.append(c)
                    adj.append([-1] * ncols)
                if u is not None:
                    adj[v][c] = u
        if r < R:
            offsets.append(len(words))
    return Ball(
        backend,
        R,
        np.array(dist, dtype=np.int16),
        np.array(adj, dtype=np.int32).reshape(-1, ncols),
        np.array(parent, dtype=np.int32),
        np.array(pcol, dtype=np.int8),
        offsets,
        words=words,
    )


# ------------------------------------------------------------------ queries
def distance_certified(ball: Ball, u: int, v: int) -> CertifiedDistance:
    """In-ball distance with the midpoint certificate (du + dv + d) / 2 <= R."""
    du, dv = int(ball.dist[u]), int(ball.dist[v])
    d = ball.group_distance(u, v)
    if d is not None and du + dv + d <= 2 * ball.radius:
        return CertifiedDistance(d, True)
    d = ball.inball_distance(u, v)
    if d is None:
        raise OutOfBallError("vertices lie in different components of the ball")
    return CertifiedDistance(d, du + dv + d <= 2 * ball.radius)


def geodesic_word(ball: Ball, u: int, v: int) -> Word:
    """Shortlex-least shortest edge path from u to v inside the ball."""
    cd = distance_certified(ball, u, v)
    if cd.safe:
        t = ball.difference_ids([u], [v])[0]
        return ball.word(int(t))
    back = ball.bfs_distances(v)
    w = []
    cur = int(u)
    while cur != v:
        for c in range(ball.ncols):
            nxt = int(ball.adjacency[cur, c])
            if nxt >= 0 and back.get(nxt, -1) == back[cur] - 1:
                w.append(column_letter(c))
                cur = nxt
                break
    return tuple(w)


def geodesic_path(ball: Ball, u: int, v: int) -> List[int]:
    return ball.walk(u, geodesic_word(ball, u, v))


def sphere(ball: Ball, r: int) -> np.ndarray:
    return ball.sphere(r)
