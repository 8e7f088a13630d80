"""Normal-form backends deciding equality of group elements.

``free``       free reduction; requires no relators.
``abelian``    sorted exponent form; relators must be exactly the commutators.
``dehn``       Dehn's algorithm; refuses presentations that fail C'(1/6).
``rewriting``  a user-supplied rewriting system, assumed terminating and
               confluent (checked only by a bounded critical-pair scan).

Dehn and rewriting normal forms are canonical for deciding the word problem
but need not be geodesic; shortlex-geodesic representatives come from a built
ball (see :mod:`hypcayley.cayley`).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import lcm
from typing import Dict, Tuple

from .errors import BackendError
from .presentation import Presentation
from .words import Word, cyclic_shifts, free_reduce, inverse, shortlex_key

KINDS = ("free", "rewriting", "dehn", "abelian")
REWRITE_STEP_LIMIT = 100_000


@dataclass(frozen=True)
class Backend:
    kind: str
    presentation: Presentation
    rules: Tuple[Tuple[Word, Word], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BackendError(f"unknown backend kind {self.kind!r}")
        if self.kind == "rewriting" and not self.rules:
            object.__setattr__(self, "rules", tuple(self.presentation.rules))

    @cached_property
    def symmetrized(self) -> Tuple[Word, ...]:
        """All cyclic shifts of relators and their inverses, as positions (may repeat)."""
        out = []
        for r in self.presentation.relators:
            out.extend(cyclic_shifts(r))
            out.extend(cyclic_shifts(inverse(r)))
        return tuple(out)

    @cached_property
    def max_piece(self) -> int:
        # proper subwords shared by two distinct positions of the symmetrized set
        best = 0
        rs = self.symmetrized
        for i, j in combinations(range(len(rs)), 2):
            u, v = rs[i], rs[j]
            k = 0
            m = min(len(u), len(v)) - 1
            while k < m and u[k] == v[k]:
                k += 1
            best = max(best, k)
        return best

    @cached_property
    def small_cancellation_ok(self) -> bool:
        rels = self.presentation.relators
        if not rels:
            return True
        return 6 * self.max_piece < min(len(r) for r in rels)

    @cached_property
    def dehn_rules(self) -> Dict[Word, Word]:
        table: Dict[Word, Word] = {}
        for s in self.symmetrized:
            n = len(s)
            for k in range(n // 2 + 1, n + 1):
                lhs, rhs = s[:k], inverse(s[k:])
                old = table.get(lhs)
                if old is None or shortlex_key(rhs) < shortlex_key(old):
                    table[lhs] = rhs
        return table

    @cached_property
    def abelian_pairs(self):
        """Generator pairs whose commutator is a relator (up to cyclic shift and inversion)."""
        pairs = set()
        for r in self.presentation.relators:
            if len(r) != 4:
                return None
            found = None
            for s in cyclic_shifts(r) + cyclic_shifts(inverse(r)):
                x, y, xi, yi = s
                if x > 0 and y > 0 and xi == -x and yi == -y and x != y:
                    found = (min(x, y), max(x, y))
                    break
            if found is None:
                return None
            pairs.add(found)
        return pairs


def make_backend(presentation: Presentation, kind: str = "auto", rules=()) -> Backend:
    """Pick a backend; ``auto`` tries free, abelian, dehn in that order."""
    if kind != "auto":
        return Backend(kind, presentation, tuple(rules))
    if not presentation.relators:
        return Backend("free", presentation)
    b = Backend("abelian", presentation)
    if _abelian_ok(b):
        return b
    b = Backend("dehn", presentation)
    if b.small_cancellation_ok:
        return b
    if presentation.rules:
        return Backend("rewriting", presentation)
    raise BackendError("no backend applies: presentation is not free, abelian or C'(1/6)")


def _abelian_ok(backend: Backend) -> bool:
    n = backend.presentation.rank
    want = {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    pairs = backend.abelian_pairs
    return pairs is not None and pairs == want and len(backend.presentation.relators) == len(want)


def dehn_reduce(backend: Backend, w: Word) -> Word:
    table = backend.dehn_rules
    lengths = sorted({len(k) for k in table}, reverse=True)
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        for i in range(len(w)):
            for k in lengths:
                if i + k <= len(w) and w[i : i + k] in table:
                    w = free_reduce(w[:i] + table[w[i : i + k]] + w[i + k :])
                    changed = True
                    break
            if changed:
                break
    return w


def exponent_vector(n: int, w: Word) -> Tuple[int, ...]:
    v = [0] * n
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


def rewrite(rules, w: Word, limit: int = REWRITE_STEP_LIMIT) -> Word:
    w = free_reduce(w)
    steps = 0
    while True:
        for lhs, rhs in rules:
            k = len(lhs)
            pos = next((i for i in range(len(w) - k + 1) if w[i : i + k] == lhs), None)
            if pos is not None:
                w = free_reduce(w[:pos] + rhs + w[pos + k :])
                break
        else:
            return w
        steps += 1
        if steps > limit:
            raise BackendError("rewriting did not terminate within the step limit")


def normal_form(backend: Backend, w: Word) -> Word:
    w = tuple(w)
    kind = backend.kind
    if kind == "free":
        if backend.presentation.relators:
            raise BackendError("free backend requires an empty relator list")
        return free_reduce(w)
    if kind == "abelian":
        if not _abelian_ok(backend):
            raise BackendError("abelian backend requires exactly the commutator relators")
        out = []
        for i, e in enumerate(exponent_vector(backend.presentation.rank, w), 1):
            out.extend([i if e > 0 else -i] * abs(e))
        return tuple(out)
    if kind == "dehn":
        if not backend.small_cancellation_ok:
            raise BackendError(
                f"dehn backend refused: max piece {backend.max_piece} violates C'(1/6)"
            )
        return dehn_reduce(backend, w)
    return rewrite(backend.rules, w)


def words_equal(backend: Backend, u: Word, v: Word) -> bool:
    if backend.kind == "dehn":
        return not normal_form(backend, inverse(u) + tuple(v))
    return normal_form(backend, u) == normal_form(backend, v)


@dataclass
class VerificationReport:
    kind: str
    status: str  # pass | fail | inconclusive
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def verify_backend(backend: Backend, max_critical_pairs: int = 10_000) -> VerificationReport:
    pres = backend.presentation
    if backend.kind == "free":
        ok = not pres.relators
        return VerificationReport("free", "pass" if ok else "fail", {"relators": len(pres.relators)})
    if backend.kind == "abelian":
        ok = _abelian_ok(backend)
        return VerificationReport("abelian", "pass" if ok else "fail", {"relators": len(pres.relators)})
    if backend.kind == "dehn":
        details = {
            "max_piece": backend.max_piece,
            "min_relator_length": min((len(r) for r in pres.relators), default=0),
        }
        return VerificationReport("dehn", "pass" if backend.small_cancellation_ok else "fail", details)
    return _verify_rewriting(backend, max_critical_pairs)


def _verify_rewriting(backend: Backend, max_pairs: int) -> VerificationReport:
    n = backend.presentation.rank
    rules = list(backend.rules)
    cancel = [((x, -x), ()) for k in range(1, n + 1) for x in (k, -k)]
    every = rules + cancel
    decreasing = all(shortlex_key(r) < shortlex_key(l) for l, r in rules)
    checked = 0
    try:
        for l1, r1 in every:
            for l2, r2 in every:
                for overlap_word, a, b in _overlaps(l1, r1, l2, r2):
                    checked += 1
                    if checked > max_pairs:
                        return VerificationReport(
                            "rewriting", "inconclusive", {"checked": checked, "reason": "pair budget"}
                        )
                    if rewrite(rules, a) != rewrite(rules, b):
                        return VerificationReport(
                            "rewriting",
                            "fail",
                            {"checked": checked, "overlap": list(overlap_word)},
                        )
    except BackendError:
        return VerificationReport("rewriting", "inconclusive", {"checked": checked, "reason": "step limit"})
    status = "pass" if decreasing else "inconclusive"
    details = {"checked": checked, "shortlex_decreasing": decreasing}
    return VerificationReport("rewriting", status, details)


def _overlaps(l1, r1, l2, r2):
    # suffix of l1 equals prefix of l2
    for k in range(1, min(len(l1), len(l2))):
        if l1[-k:] == l2[:k]:
            word = l1 + l2[k:]
            yield word, r1 + l2[k:], l1[:-k] + r2
    # l2 strictly inside l1
    if (l1, r1) != (l2, r2):
        for i in range(len(l1) - len(l2) + 1):
            if l1[i : i + len(l2)] == l2:
                yield l1, r1, l1[:i] + r2 + l1[i + len(l2) :]


def abelian_invariant_basis(presentation: Presentation):
    """Integer vectors orthogonal to every relator's exponent vector.

    Dotting a word's exponent vector with these gives a homomorphism to Z^k,
    used to bucket candidates before an exact equality test.
    """
    n = presentation.rank
    rows = [list(map(Fraction, exponent_vector(n, r))) for r in presentation.relators]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    basis = []
    for f in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f]
        scale = lcm(*(x.denominator for x in v))
        basis.append(tuple(int(x * scale) for x in v))
    return basis


def abelian_invariant(basis, n: int, w: Word) -> Tuple[int, ...]:
    e = exponent_vector(n, w)
    return tuple(sum(a * b for a, b in zip(v, e)) for v in basis)
