from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisenlab import geometry as geo
from heisenlab.geometry import ExponentPoint as P
from heisenlab.geometry import RegionSpec


@st.composite
def regions(draw):
    n = draw(st.integers(1, 5))
    num = draw(st.integers(0, 2 * n * 12 - 1))
    return RegionSpec(n, F(num, 12))


points = st.builds(P, st.fractions(0, 1, max_denominator=50), st.fractions(0, 1, max_denominator=50))


# --- region predicates

@given(regions())
def test_diagonal_endpoints_always_in_region(r):
    assert geo.necessary_region(r, P(0, 0)) and geo.necessary_region(r, P(1, 1))


def test_vertex_with_equalities_n1():
    r = RegionSpec(1)
    pt = P(F(3, 4), F(1, 4))
    assert geo.necessary_region(r, pt)
    _, knapp, dual, _ = geo.constraint_lines(r)
    assert knapp.at(pt.inv_p) == pt.inv_q and dual.at(pt.inv_p) == pt.inv_q
    assert not geo.open_region(r, pt)


def test_corner_outside():
    assert not geo.necessary_region(RegionSpec(1), P(1, 0))


@given(regions(), points)
def test_region_symmetric_under_duality(r, pt):
    assert geo.necessary_region(r, pt) == geo.necessary_region(r, geo.reflect(pt))
    assert geo.open_region(r, pt) == geo.open_region(r, geo.reflect(pt))


@given(regions(), points)
def test_open_region_inside_closed(r, pt):
    if geo.open_region(r, pt):
        assert geo.necessary_region(r, pt)


# --- vertices

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_vertex_D_gamma_zero(n):
    assert geo.vertex_D(RegionSpec(n)) == P(F(2 * n + 1, 2 * n + 2), F(1, 2 * n + 2))


def test_vertex_examples():
    assert geo.vertex_D(RegionSpec(1)) == P(F(3, 4), F(1, 4))
    assert geo.vertex_Dprime(RegionSpec(1)) == P(F(3, 4), F(1, 4))
    r = RegionSpec(1, 1)
    assert geo.vertex_D(r) == P(F(7, 8), F(5, 8))
    assert geo.vertex_Dprime(r) == P(F(3, 8), F(1, 8))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("gamma", [F(0), F(1, 2), F(1)])
def test_vertex_D_is_line_intersection(n, gamma):
    r = RegionSpec(n, gamma)
    D = geo.vertex_D(r)
    _, knapp, _, frac_line = geo.constraint_lines(r)
    assert knapp.at(D.inv_p) == D.inv_q
    assert frac_line.at(D.inv_p) == D.inv_q
    assert geo.necessary_region(r, D)


@given(regions())
def test_reflection_is_involution(r):
    assert geo.reflect(geo.vertex_Dprime(r)) == geo.vertex_D(r)


# --- interpolation

def test_interpolation_endpoints_and_midpoint():
    a, b = P(F(1, 3), F(1, 5)), P(1, 1)
    assert geo.riesz_interpolate(a, b, 0) == a
    assert geo.riesz_interpolate(a, b, 1) == b
    assert geo.riesz_interpolate(P(0, 0), P(1, 1), F(1, 2)) == P(F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        geo.riesz_interpolate(a, b, F(3, 2))


def test_theta_star_examples():
    assert geo.theta_star(RegionSpec(1, 1)) == F(1, 2)
    assert geo.theta_star(RegionSpec(1, 0)) == 0
    assert geo.theta_star(RegionSpec(2, 1)) == F(1, 4)


@given(regions(), st.integers(0, 50))
def test_theta_star_balances_exactly(r, k):
    assert geo.theta_balance(r, geo.theta_star(r), k) == 0


@given(regions())
def test_interpolation_at_theta_star_hits_D(r):
    n = r.n
    endpoint = P(F(2 * n + 1, 2 * n + 2), F(1, 2 * n + 2))
    assert geo.riesz_interpolate(endpoint, P(1, 1), geo.theta_star(r)) == geo.vertex_D(r)


@given(regions(), st.integers(0, 20))
def test_interpolated_annulus_bound_is_flat_at_theta_star(r, k):
    assert geo.interpolated_annulus_exponent(r, k, geo.theta_star(r)) == 0


# --- scaling line and dyadic bookkeeping

def test_scaling_line_examples():
    assert geo.scaling_line(1, P(F(3, 4), F(1, 4)))
    for n in (1, 2, 3):
        assert not geo.scaling_line(n, P(1, 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_scaling_line_meets_triangle_at_D(n):
    hits = geo.scaling_line_intersections(n)
    assert all(h == geo.vertex_D(RegionSpec(n)) for h in hits)


def test_predicted_annulus_exponents():
    assert geo.predicted_annulus_exponents(RegionSpec(2), 3) == (-12, 0)
    assert geo.predicted_annulus_exponents(RegionSpec(1, 1), 3) == (-3, 3)
    with pytest.raises(ValueError):
        geo.predicted_annulus_exponents(RegionSpec(1), -1)


@given(regions().filter(lambda r: r.gamma < 2 * r.n), st.fractions(F(1, 10), 1))
def test_dyadic_partial_sums_converge(r, tau):
    sums = geo.dyadic_partial_sums(r, tau, 60)
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    rate = float((2 * r.n - r.gamma) * tau)
    assert sums[-1] <= 1 / (1 - 2.0**-rate) + 1e-9


# --- types

def test_exponent_point_validation_and_exponents():
    pt = P(F(3, 4), F(1, 4))
    assert pt.p == F(4, 3) and pt.q == 4
    assert P(0, 0).p == float("inf")
    with pytest.raises(ValueError):
        P(F(5, 4), 0)


def test_region_spec_validation():
    with pytest.raises(ValueError):
        RegionSpec(1, 2)
    with pytest.raises(ValueError):
        RegionSpec(0)
    approx = RegionSpec(1, 0.1)
    assert approx.approximate and approx.gamma == F(0.1)
    assert not RegionSpec(1, F(1, 10)).approximate


def test_distance_to_boundary():
    r = RegionSpec(1)
    assert geo.distance_to_boundary(r, P(F(3, 4), F(1, 4))) == 0
    assert geo.distance_to_boundary(r, P(F(1, 2), F(1, 2))) == 0
    assert geo.distance_to_boundary(r, P(F(371, 1000), F(229, 1000))) == pytest.approx(0.1, abs=2e-3)
