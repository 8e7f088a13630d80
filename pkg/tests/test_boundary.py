import math

import numpy as np
import pytest

from _support import ball, lcp
from hypcayley.boundary import (
    VisualMetricParams,
    boundary_gromov_product,
    distance_matrix_csv,
    enumerate_rays,
    pairwise_products,
    ray_from_word,
    uniformity_check,
    uniformity_scan,
    visual_distance,
)
from hypcayley.errors import OutOfBallError, UnsafeDistanceError
from hypcayley.geometry import delta_four_point


def test_ray_counts():
    assert len(enumerate_rays(ball("free2", 4), 3)) == 36
    assert len(enumerate_rays(ball("z2", 4), 3)) == 12
    b = ball("surface2", 5)
    assert len(enumerate_rays(b, 5)) == len(b.sphere(5)) == 19096
    with pytest.raises(OutOfBallError):
        enumerate_rays(b, 6)


def test_all_policy_counts_geodesics():
    # geodesics to (i, j) with |i| + |j| = 3 number binom(3, |i|): 4 axis points, 8 others
    rays = enumerate_rays(ball("z2", 4), 3, "all")
    assert len(rays) == 4 * 1 + 8 * 3
    assert len({r.word for r in rays}) == len(rays)


def test_sample_policy_seeded():
    b = ball("surface2", 5)
    a = enumerate_rays(b, 5, "sample", count=50, seed=4)
    c = enumerate_rays(b, 5, "sample", count=50, seed=4)
    assert [r.word for r in a] == [r.word for r in c]


def test_free_products_are_prefixes():
    b = ball("free2", 8)
    rays = enumerate_rays(b, 6, "sample", count=120, seed=1)
    P = pairwise_products(b, rays, 1)
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            assert P[i, j] == 2 * lcp(rays[i].word, rays[j].word)


def test_product_examples():
    b = ball("free2", 8)
    c = ray_from_word(b, (1,) * 6)
    c2 = ray_from_word(b, (1, 1) + (2,) * 4)
    assert boundary_gromov_product(b, c, c2, 1) == 4
    assert boundary_gromov_product(b, c, c, 3) == 12
    with pytest.raises(UnsafeDistanceError):
        ray_from_word(b, (1, -1, 1))


def test_visual_distance_examples():
    p = VisualMetricParams(2.0, 0, 2)
    assert visual_distance(p, 4) == 0.25
    assert visual_distance(p, 0) == 1.0
    assert visual_distance(p, 12) == 2.0**-6
    assert math.isclose(p.k3, math.sqrt(2), rel_tol=1e-15)
    with pytest.raises(ValueError):
        VisualMetricParams(1.0, 0, 2)
    with pytest.raises(ValueError):
        VisualMetricParams(2.0, 2, 4)


def test_from_delta_defaults():
    p = VisualMetricParams.from_delta(4)
    assert p.D_x2 == 10 and p.window == 5
    assert math.isclose(p.a, 2 ** (1 / 9))
    assert math.isclose(p.k3, p.a ** (10 / 4 + 8))


def test_free_uniformity_example():
    b = ball("free2", 8)
    p = VisualMetricParams(2.0, 0, 2)
    c = ray_from_word(b, (1, 2, 1, 1, 2, 2))
    c2 = ray_from_word(b, (1, 2, 1, -2, 1, 1))
    for r in range(7):
        rep = uniformity_check(b, p, c, c2, r, window=1)
        assert rep.passed
        if rep.applicable:
            assert rep.value == 2.0**-3 <= math.sqrt(2) * 2.0**-r
    same = uniformity_check(b, p, c, c, 6, window=1)
    assert same.applicable and same.passed and same.value == 2.0**-6


@pytest.mark.parametrize("name,Rb,count", [("free2", 10, 200), ("z2", 12, 0), ("surface2", 7, 40)])
def test_sandwich_gromov_and_quasimetric(name, Rb, count):
    b = ball(name, Rb)
    d = delta_four_point(b).delta_four_point_x2
    vis = VisualMetricParams.from_delta(d)
    rays = enumerate_rays(b, 6, "sample" if count else "one-per-endpoint", count=count, seed=0)
    PW = pairwise_products(b, rays, vis.window)
    P0 = pairwise_products(b, rays, 0)
    assert (P0 == P0.T).all()
    gap = P0 - PW
    assert gap.min() >= 0 and gap.max() <= 2 * d
    n = len(rays)
    x, y, z = np.random.default_rng(0).integers(0, n, (3, 20000))
    assert (PW[x, y] >= np.minimum(PW[x, z], PW[z, y]) - 3 * d).all()
    V = vis.a ** (-PW / 2)
    K = vis.a ** (3 * d / 2)
    assert (V[x, y] <= K * np.maximum(V[x, z], V[z, y]) * (1 + 1e-12)).all()
    scan = uniformity_scan(b, vis, rays)
    assert scan.violations == 0 and scan.applicable > 0


def test_distance_csv():
    b = ball("free2", 4)
    rays = enumerate_rays(b, 1)
    vis = VisualMetricParams(2.0, 0, 2)
    lines = distance_matrix_csv(rays, pairwise_products(b, rays, 1), vis).splitlines()
    assert lines[0] == "i,j,product_x2,visual"
    assert lines[1] == "0,1,0,1"
    assert len(lines) == 1 + 6
