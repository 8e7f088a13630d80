import numpy as np
import pytest

from _support import ball, z2_avoid_length, z2_ddag_table, z2_point
from hypcayley import ddag
from hypcayley.ddag import (
    DdagConstants,
    avoid_ball_distance,
    extend_shortlex,
    push_iterate,
    push_path,
    qualified_pairs,
)
from hypcayley.errors import ForbiddenEndpointError, OutOfBallError, PushPathError


def restricted_bfs(b, y, z, forbid, depth):
    """Plain BFS over the ball's edge table, skipping vertices with dist <= forbid."""
    seen, frontier = {y}, [y]
    for d in range(1, depth + 1):
        nxt = []
        for v in frontier:
            for u in b.adjacency[v].tolist():
                if u >= 0 and u not in seen and b.dist[u] > forbid:
                    if u == z:
                        return d
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return None


def test_constants():
    k = DdagConstants.derive(1)
    assert (k.M, k.manual_M, k.L) == (9, False, None)
    k = DdagConstants.derive(0, 5, 7)
    assert k.manual_M and k.lam == 5


def test_free_example_unreachable():
    b = ball("free2", 6)
    res = avoid_ball_distance(b, b.locate_word((1, 1)), b.locate_word((1, 2)), 0, 1)
    assert res.status == "unreachable" and res.length is None


def test_z2_example():
    b = ball("z2", 6)
    y, z = b.locate_word((1, 1)), b.locate_word((1, 2))
    res = avoid_ball_distance(b, y, z, 0, 1)
    assert res.length == 2
    assert [z2_point(b.word(v)) for v in res.path] == [(2, 0), (2, 1), (1, 1)]


def test_forbidden_endpoint():
    b = ball("z2", 4)
    with pytest.raises(ForbiddenEndpointError):
        avoid_ball_distance(b, b.locate_word((1,)), b.locate_word((1, 1)), 0, 1)


@pytest.mark.parametrize("R", [3, 4])
def test_z2_avoidance_matches_lattice_oracle(R):
    b = ball("z2", 12)
    for y, z in qualified_pairs(b, R, 3):
        res = avoid_ball_distance(b, y, z, 0, R - 1)
        assert res.length == z2_avoid_length(z2_point(b.word(y)), z2_point(b.word(z)), R - 1, 40)


def test_surface_avoidance_matches_restricted_bfs():
    b = ball("surface2", 7)
    pairs = qualified_pairs(b, 4, 3)
    rng = np.random.default_rng(2)
    for k in rng.choice(len(pairs), 200, replace=False):
        y, z = pairs[k]
        res = avoid_ball_distance(b, y, z, 0, 2)
        assert res.reachable
        assert res.length == restricted_bfs(b, y, z, 2, res.visible_bound)
        assert all(b.dist[v] > 2 for v in res.path)


def test_free_ddag_disconnected():
    rep = ddag.test_ddag(ball("free2", 11), 3, 0, 2, 5)
    assert rep.verdict == "disconnected"
    assert all(r.maxL is None and r.unreachable > 0 for r in rep.rows)


def test_z2_ddag_matches_lattice_oracle():
    rep = ddag.test_ddag(ball("z2", 12), 3, 0, 3, 5)
    assert rep.verdict == "bounded"
    assert rep.table() == z2_ddag_table(3, 0, 3, 5)
    assert rep.to_csv().splitlines()[0] == "R,maxL,reachable,unreachable,inconclusive"


def test_ddag_range_checked():
    with pytest.raises(OutOfBallError):
        ddag.test_ddag(ball("z2", 4), 3, 0, 2, 4)


def test_surface_visible_only_is_not_conclusive():
    rep = ddag.test_ddag(ball("surface2", 6), None, 0, 2, 2, budget=12)
    assert rep.verdict in ("inconclusive", "disconnected")
    assert rep.rows[0].maxL is None
    assert rep.to_csv().splitlines()[1].split(",")[1] in ("unknown", "unbounded")


Z2 = DdagConstants.derive(0, 4, 3)


def _z2_quarter_arc(b):
    pts = [(1, 1, 1), (1, 1, 1, 2), (1, 1, 2), (1, 1, 2, 2), (1, 2, 2), (1, 2, 2, 2), (2, 2, 2)]
    return [b.locate_word(w) for w in pts]


def test_z2_push_quarter_arc():
    b = ball("z2", 12)
    alpha = _z2_quarter_arc(b)
    res = push_path(b, alpha, (1,) * 8, (2,) * 8, 2, Z2)
    assert min(b.dist[v] for v in res.beta) >= 3
    assert res.length <= Z2.lam * (len(alpha) - 1)
    assert res.beta[0] == b.locate_word((1, 1, 1)) and res.beta[-1] == b.locate_word((2, 2, 2))
    for u, v in zip(res.beta, res.beta[1:]):
        assert v in b.neighbors(u)


def test_z2_push_iterates_outward():
    b = ball("z2", 12)
    alpha = _z2_quarter_arc(b)
    steps = push_iterate(b, alpha, (1,) * 8, (2,) * 8, 3, 3, Z2)
    for k, res in enumerate(steps):
        assert min(b.dist[v] for v in res.beta) >= 3 + k + 1


def test_single_vertex_slides_along_ray():
    b = ball("z2", 8)
    res = push_path(b, [b.locate_word((1, 1, 1))], (1,) * 6, (1,) * 6, 3, Z2)
    assert [b.word(v) for v in res.beta] == [(1, 1, 1, 1)]


def test_push_rejects_bad_input():
    b = ball("z2", 10)
    a3, b3 = b.locate_word((1, 1, 1)), b.locate_word((2, 2, 2))
    with pytest.raises(PushPathError):
        push_path(b, [a3, b3], (1,) * 6, (2,) * 6, 2, Z2)  # not unit steps
    with pytest.raises(PushPathError):
        push_path(b, _z2_quarter_arc(b), (1,) * 6, (2,) * 6, 4, Z2)  # enters B(p, 4)
    with pytest.raises(PushPathError):
        push_path(b, [a3], (1,) * 6, (1,) * 6, 3, DdagConstants.derive(0))  # L unbounded


def test_extend_shortlex():
    b = ball("z2", 6)
    assert extend_shortlex(b, b.locate_word((1, 2)), 4) == (1, 2, 1, 1)
