"""Homomorphic element encodings used to identify vertices while building balls.

A codec maps each generator to a row vector so that group multiplication
becomes a vectorised row operation.  ``AbelianCodec`` is faithful.
``SL2Codec`` is a homomorphism into SL(2, F_p) with p ~ 2**30: equal elements
always get equal rows, distinct elements collide only on kernel elements,
whose shortest length is far beyond desk-scale radii for random images.
``Ball.verify_identifications`` re-checks every edge with the exact backend
normal form when certainty is wanted.
"""

import random
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .backends import Backend
from .words import Word, cyclic_shifts, inverse

P = 1073741783  # prime, 3 mod 4, below 2**30.5 so row products fit in int64
_K1 = np.uint64(0x9E3779B97F4A7C15)
_K2 = np.uint64(0xC2B2AE3D27D4EB4F)

Mat = Tuple[int, int, int, int]
IDENTITY: Mat = (1, 0, 0, 1)


def mat_mul(x: Mat, y: Mat) -> Mat:
    return (
        (x[0] * y[0] + x[1] * y[2]) % P,
        (x[0] * y[1] + x[1] * y[3]) % P,
        (x[2] * y[0] + x[3] * y[2]) % P,
        (x[2] * y[1] + x[3] * y[3]) % P,
    )


def mat_inv(x: Mat) -> Mat:
    return (x[3], (-x[1]) % P, (-x[2]) % P, x[0])


def commutator(x: Mat, y: Mat) -> Mat:
    return mat_mul(mat_mul(x, y), mat_mul(mat_inv(x), mat_inv(y)))


def random_sl2(rng: random.Random) -> Mat:
    a, b, c = rng.randrange(1, P), rng.randrange(P), rng.randrange(P)
    return (a, b, c, (1 + b * c) * pow(a, -1, P) % P)


def _nullspace(rows: List[List[int]], ncols: int) -> List[List[int]]:
    a = [[x % P for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(a)) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        iv = pow(a[r][c], -1, P)
        a[r] = [x * iv % P for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % P for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    out = []
    for f in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-a[i][f]) % P
        out.append(v)
    return out


def solve_commutator(target: Mat, rng: random.Random) -> Tuple[Mat, Mat]:
    """Return (C, D) in SL(2, F_p) with C D C^-1 D^-1 == target."""
    e = ((target[0] - 1) % P, target[1], target[2], (target[3] - 1) % P)
    for _ in range(1000):
        # Y = C^-1 must satisfy tr(Y) == tr(Y * target) and det Y == 1
        y11, y12 = rng.randrange(1, P), rng.randrange(P)
        i11 = pow(y11, -1, P)
        coef = (e[1] + y12 * i11 * e[3]) % P
        const = (y11 * e[0] + y12 * e[2] + i11 * e[3]) % P
        if coef == 0:
            continue
        y21 = (-const) * pow(coef, -1, P) % P
        y = (y11, y12, y21, (1 + y12 * y21) * i11 % P)
        z = mat_mul(y, target)
        system = [
            [y[0] - z[0], y[2], -z[1], 0],
            [y[1], y[3] - z[0], 0, -z[1]],
            [-z[2], 0, y[0] - z[3], y[2]],
            [0, -z[2], y[1], y[3] - z[3]],
        ]
        basis = _nullspace(system, 4)
        if not basis:
            continue
        for _ in range(50):
            coeffs = [rng.randrange(P) for _ in basis]
            d = [sum(c * v[i] for c, v in zip(coeffs, basis)) % P for i in range(4)]
            det = (d[0] * d[3] - d[1] * d[2]) % P
            if det == 0 or pow(det, (P - 1) // 2, P) != 1:
                continue
            s = pow(det, (P + 1) // 4, P)
            si = pow(s, -1, P)
            dm = tuple(x * si % P for x in d)
            cm = mat_inv(y)
            if commutator(cm, dm) == target:
                return cm, dm
    raise RuntimeError("could not solve the commutator equation")


def _commutator_blocks(relator: Word) -> Optional[List[Tuple[int, int]]]:
    """Split a relator into commutator blocks [x1,y1]...[xg,yg] of distinct generators."""
    for s in cyclic_shifts(relator) + cyclic_shifts(inverse(relator)):
        if len(s) % 4:
            return None
        blocks = []
        for i in range(0, len(s), 4):
            x, y, xi, yi = s[i : i + 4]
            if xi != -x or yi != -y or abs(x) == abs(y):
                break
            blocks.append((x, y))
        else:
            used = [abs(v) for b in blocks for v in b]
            if len(set(used)) == len(used):
                return blocks
    return None


def row_hash(rows: np.ndarray) -> np.ndarray:
    h = np.zeros(len(rows), dtype=np.uint64)
    for j in range(rows.shape[1]):
        h = (h ^ rows[:, j].astype(np.uint64)) * _K1
        h ^= h >> np.uint64(29)
    return (h * _K2).view(np.int64)


class SL2Codec:
    width = 4
    exact = False

    def __init__(self, gen_mats: Sequence[Mat]):
        self.gen_mats = list(gen_mats)
        cols = []
        for m in self.gen_mats:
            cols.append(m)
            cols.append(mat_inv(m))
        self.gen_rows = np.array(cols, dtype=np.int64)

    def identity(self) -> np.ndarray:
        return np.array(IDENTITY, dtype=np.int64)

    def act(self, rows: np.ndarray, col: int) -> np.ndarray:
        return self.mul(rows, self.gen_rows[col][None, :])

    @staticmethod
    def mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        y = np.atleast_2d(y)
        out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
        out[:, 0] = (x[:, 0] * y[:, 0] + x[:, 1] * y[:, 2]) % P
        out[:, 1] = (x[:, 0] * y[:, 1] + x[:, 1] * y[:, 3]) % P
        out[:, 2] = (x[:, 2] * y[:, 0] + x[:, 3] * y[:, 2]) % P
        out[:, 3] = (x[:, 2] * y[:, 1] + x[:, 3] * y[:, 3]) % P
        return out

    @staticmethod
    def inv(x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.stack([x[:, 3], (-x[:, 1]) % P, (-x[:, 2]) % P, x[:, 0]], axis=1)

    def element(self, w: Word) -> np.ndarray:
        m = IDENTITY
        for x in w:
            g = self.gen_mats[abs(x) - 1]
            m = mat_mul(m, g if x > 0 else mat_inv(g))
        return np.array(m, dtype=np.int64)


class AbelianCodec:
    exact = True

    def __init__(self, rank: int):
        self.width = rank
        rows = []
        for k in range(rank):
            e = np.zeros(rank, dtype=np.int64)
            e[k] = 1
            rows.extend([e, -e])
        self.gen_rows = np.array(rows, dtype=np.int64)

    def identity(self) -> np.ndarray:
        return np.zeros(self.width, dtype=np.int64)

    def act(self, rows, col):
        return rows + self.gen_rows[col][None, :]

    @staticmethod
    def mul(x, y):
        return np.atleast_2d(x) + np.atleast_2d(y)

    @staticmethod
    def inv(x):
        return -np.atleast_2d(x)

    def element(self, w: Word) -> np.ndarray:
        v = np.zeros(self.width, dtype=np.int64)
        for x in w:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return v


def codec_for(backend: Backend, seed: int = 20240601):
    """A vectorised codec for the backend, or None when only the slow path applies."""
    pres = backend.presentation
    rng = random.Random(seed)
    if backend.kind == "abelian":
        return AbelianCodec(pres.rank)
    if backend.kind == "free":
        return SL2Codec([random_sl2(rng) for _ in range(pres.rank)])
    if backend.kind == "dehn" and len(pres.relators) == 1:
        blocks = _commutator_blocks(pres.relators[0])
        if blocks is None:
            return None
        mats = {k: random_sl2(rng) for k in range(1, pres.rank + 1)}
        letter = {}
        prod = IDENTITY
        for x, y in blocks[:-1]:
            letter[x], letter[y] = random_sl2(rng), random_sl2(rng)
            prod = mat_mul(prod, commutator(letter[x], letter[y]))
        x, y = blocks[-1]
        letter[x], letter[y] = solve_commutator(mat_inv(prod), rng)
        for l, m in letter.items():
            mats[abs(l)] = m if l > 0 else mat_inv(m)
        codec = SL2Codec([mats[k] for k in range(1, pres.rank + 1)])
        check = codec.element(pres.relators[0])
        if tuple(int(v) for v in check) != IDENTITY:
            raise RuntimeError("SL(2) representation does not satisfy the relator")
        return codec
    return None
