import math
from fractions import Fraction

import pytest

from _support import ball
from hypcayley.boundary import VisualMetricParams, ray_from_word
from hypcayley.chains import (
    BoundaryChainParams,
    Corner,
    boundary_chain,
    euclid,
    grid_cover_radius,
    hilbert_centers,
    hilbert_inserter,
    hilbert_refinement,
    hilbert_svg,
    linear_connectivity_constant,
    refine_chain,
)
from hypcayley.ddag import DdagConstants
from hypcayley.errors import ChainContractError, DisconnectedError


def test_nu_examples():
    assert linear_connectivity_constant(0.5, 4) == 8
    assert linear_connectivity_constant(Fraction(1, 4), 2) == Fraction(4, 3)
    assert math.isclose(linear_connectivity_constant(0.25, 2), 4 / 3, rel_tol=1e-15)
    with pytest.raises(ValueError):
        linear_connectivity_constant(1.0, 3)


def midpoints(p, q):
    return [p, (p + q) / 2, q]


def interval(p, q):
    return abs(p - q)


def test_base_level_is_the_inserter_chain():
    ref = refine_chain(midpoints, Fraction(0), Fraction(1), Fraction(1, 2), 2, 1, interval)
    assert list(ref.levels[0]) == midpoints(Fraction(0), Fraction(1))


@pytest.mark.parametrize("k", [1, 2, 5])
def test_interval_refinement_certificate(k):
    rho = Fraction(1, 2)
    ref = refine_chain(midpoints, Fraction(0), Fraction(1), rho, 2, k, interval)
    assert ref.certified
    assert len(ref.levels[-1]) == 2**k + 1
    for j, (d, b) in enumerate(zip(ref.diameters, ref.bounds), start=1):
        assert b == 2 * 2 * sum(rho**i for i in range(1, j + 1))
        assert d <= b and d <= ref.nu


def test_contract_violations_raise():
    bad_gap = lambda p, q: [p, q]
    with pytest.raises(ChainContractError):
        refine_chain(bad_gap, Fraction(0), Fraction(1), Fraction(1, 2), 2, 1, interval)
    too_long = lambda p, q: [p + (q - p) * Fraction(i, 4) for i in range(5)]
    with pytest.raises(ChainContractError):
        refine_chain(too_long, Fraction(0), Fraction(1), Fraction(1, 2), 3, 1, interval)
    wrong_end = lambda p, q: [p, (p + q) / 2]
    with pytest.raises(ChainContractError):
        refine_chain(wrong_end, Fraction(0), Fraction(1), Fraction(1, 2), 2, 1, interval)


def test_hilbert_level_one():
    q = Fraction(1, 4)
    assert hilbert_centers(1) == [(q, q), (q, 3 * q), (3 * q, 3 * q), (3 * q, q)]


def test_hilbert_inserter_keeps_endpoints():
    p, q = Corner(Fraction(0), Fraction(0), 1), Corner(Fraction(1), Fraction(0), 1)
    sub = hilbert_inserter(p, q)
    assert sub[0].xy == p.xy and sub[-1].xy == q.xy and len(sub) == 5
    with pytest.raises(ValueError):
        hilbert_inserter(p, Corner(Fraction(1), Fraction(1), 1))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_hilbert_levels(k):
    pts = hilbert_centers(k)
    assert len(pts) == len(set(pts)) == 4**k
    assert {euclid(a, b) for a, b in zip(pts, pts[1:])} == {2.0**-k}
    assert grid_cover_radius(pts, k) == math.sqrt(2) / 2**k
    assert hilbert_refinement(k).certified


def test_grid_cover_detects_holes():
    assert grid_cover_radius(hilbert_centers(2)[:-1], 2) is None


def test_svg():
    svg = hilbert_svg(hilbert_centers(1), size=100)
    assert svg.startswith("<svg") and "25.000,75.000" in svg


def test_smallest_m_is_minimal():
    vis = VisualMetricParams.from_delta(4)
    for C in (0, 1, 2):
        m = BoundaryChainParams.smallest_m(vis, C)
        assert vis.a**m > vis.k3 * vis.a ** (2 * C) / vis.k1
        assert not vis.a ** (m - 1) > vis.k3 * vis.a ** (2 * C) / vis.k1
        assert BoundaryChainParams(m, DdagConstants.derive(C, 1), vis).rho < 1


def test_free_chain_reports_disconnection():
    b = ball("free2", 10)
    x = ray_from_word(b, (1, 1, 1, 1, 1, 1))
    x2 = ray_from_word(b, (1, 1, 2, 2, 2, 2))
    params = BoundaryChainParams(2, DdagConstants.derive(0, 10, 3), VisualMetricParams.from_delta(0))
    with pytest.raises(DisconnectedError) as err:
        boundary_chain(b, x, x2, params)
    assert err.value.code == "disconnected"
    assert err.value.stage == "push1"


def test_unbounded_L_refused():
    b = ball("z2", 8)
    x, x2 = ray_from_word(b, (1,) * 6), ray_from_word(b, (2,) * 6)
    params = BoundaryChainParams(1, DdagConstants.derive(0), VisualMetricParams.from_delta(2))
    with pytest.raises(DisconnectedError):
        boundary_chain(b, x, x2, params)
