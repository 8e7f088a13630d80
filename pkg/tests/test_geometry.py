import numpy as np
import pytest
from hypothesis import given, strategies as st

from _support import ball, brute_four_point_x2, diamond, l1, lcp
from hypcayley.boundary import enumerate_rays
from hypcayley.errors import UnsafeDistanceError
from hypcayley.geometry import (
    EnumerationPolicy,
    delta_four_point,
    extendability_constant,
    gromov_product,
    safe_region,
    tripod_lemma_check,
    tripod_values,
)


def test_gromov_product_examples():
    assert gromov_product(3, 5, 4).value == 2
    assert gromov_product(7, 7, 0).value == 7
    with pytest.raises(UnsafeDistanceError):
        gromov_product(1, 1, 5)


def test_free_product_is_common_prefix():
    b = ball("free2", 4)
    x, y = b.locate_word((1, 2)), b.locate_word((1, -2))
    g = gromov_product(int(b.dist[x]), int(b.dist[y]), b.group_distance(x, y))
    assert g.value == 1 == lcp((1, 2), (1, -2))


def test_tripod_examples():
    b = ball("free2", 4)
    t = tripod_values(b, 0, b.locate_word((1, 1)), b.locate_word((1, 2)))
    assert (t.a_x2, t.b_x2, t.c_x2) == (2, 2, 2)
    t = tripod_values(b, 0, b.locate_word((1, 2, 1)), b.locate_word((1, 2)))
    assert t.c_x2 == 0 and t.identities_hold()


@given(st.integers(0, 64), st.integers(0, 64), st.integers(0, 64), st.sampled_from(["free2", "z2", "surface2"]))
def test_tripod_identities_and_bounds(i, j, k, name):
    b = ball(name, 4)
    reg = safe_region(b)
    x, y, z = (int(reg[t % len(reg)]) for t in (i, j, k))
    t = tripod_values(b, x, y, z)
    assert t.identities_hold()
    assert 0 <= t.a_x2 <= 2 * min(t.dxy, t.dxz)
    # symmetry in y and z
    assert tripod_values(b, x, z, y).a_x2 == t.a_x2


def test_surface_tripod_distances_by_bfs():
    b = ball("surface2", 5)
    reg = safe_region(b)
    rng = np.random.default_rng(5)
    for _ in range(30):
        x, y, z = (int(v) for v in rng.choice(reg, 3))
        t = tripod_values(b, x, y, z)
        assert t.dxy == b.inball_distance(x, y)
        assert t.dyz == b.inball_distance(y, z)
        assert t.identities_hold()


@pytest.mark.parametrize("R", [2, 4, 6])
def test_free_delta_is_zero(R):
    est = delta_four_point(ball("free2", R))
    assert est.exhaustive
    assert est.delta_four_point_x2 == 0 and est.delta_thin_x2 == 0


def test_z2_delta_matches_quadruple_oracle_and_grows():
    vals = []
    for R in (2, 4, 6):
        est = delta_four_point(ball("z2", R))
        assert est.exhaustive
        assert est.delta_four_point_x2 == brute_four_point_x2(diamond(R // 2), l1)
        vals.append(est.delta_four_point_x2)
    assert vals == sorted(vals) and vals[-1] > vals[0]


def test_surface_regression_constants():
    est = delta_four_point(ball("surface2", 5))
    assert est.exhaustive and est.region_size == 65
    assert (est.delta_four_point_x2, est.delta_thin_x2) == (0, 8)
    ext = extendability_constant(ball("surface2", 6), 2)
    assert ext.C == 0


def test_sampled_policy_is_seeded():
    pol = EnumerationPolicy(exhaustive_threshold=10, samples=5000, seed=3)
    a = delta_four_point(ball("surface2", 6), pol)
    b = delta_four_point(ball("surface2", 6), pol)
    assert not a.exhaustive and a == b
    assert a.delta_four_point_x2 <= a.delta_thin_x2 * 2


@pytest.mark.parametrize("name", ["free2", "z2"])
def test_extendability_trivial_cases(name):
    assert extendability_constant(ball(name, 5), 1).C == 0


def test_tripod_lemma_examples():
    b = ball("free2", 5)
    r = tripod_lemma_check(b, (1, 1, 1, 1), (1, 1, 2, 2), 0)
    assert r.product_x2 == 4 and r.max_distance == 0 and r.passed
    r = tripod_lemma_check(b, (1, 2, 1), (1, 2, 1), 0)
    assert r.distances == [0, 0, 0, 0]


def test_surface_tripod_lemma_against_estimates():
    b = ball("surface2", 5)
    thin = delta_four_point(b).delta_thin_x2
    four = delta_four_point(ball("surface2", 7)).delta_four_point_x2
    assert four == 4
    rays = enumerate_rays(b, 5, "sample", count=40, seed=0)
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            for d in (thin, four):
                r = tripod_lemma_check(b, rays[i].word, rays[j].word, d)
                assert r.unsafe == 0 and r.passed
