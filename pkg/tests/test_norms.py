from fractions import Fraction as F

import numpy as np
import pytest

from heisenlab.geometry import ExponentPoint, RegionSpec
from heisenlab.grid import GridSpec
from heisenlab.measures import discretize_mu, discretize_nu, identity_measure
from heisenlab.norms import (adjoint_defect, bound_11, classify_slope, dilation_slope, estimate_norm_pq,
                             matrix_operator, measure_operator, predicted_dilation_slope, refine_and_classify,
                             scan_typeset, theory_member)

TINY = GridSpec(1, 2.0, 8, 4.0, 8)
SCAN_GRIDS = [GridSpec(1, 2.0, N, 4.0, N) for N in (8, 16, 32)]


def nu0_operator(g):
    return measure_operator(discretize_nu(np.eye(2), 0, g), g)


def materialize(T):
    size = int(np.prod(T.shape))
    cols = []
    for j in range(size):
        e = np.zeros(size)
        e[j] = 1.0
        cols.append(T.forward(e.reshape(T.shape)).ravel())
    return np.array(cols).T


# --- estimator against oracles

def test_identity_operator_has_norm_one():
    T = measure_operator(identity_measure(1), TINY)
    assert estimate_norm_pq(T, 2, 2).norm == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("c", [0.25, 3.0])
def test_scaled_identity(c):
    T = measure_operator(identity_measure(1, c), TINY)
    assert estimate_norm_pq(T, 2, 2).norm == pytest.approx(c, rel=1e-6)


@pytest.mark.parametrize("seed", range(3))
def test_dense_matrix_matches_svd(seed):
    M = np.random.default_rng(seed).standard_normal((16, 16))
    est = estimate_norm_pq(matrix_operator(M), 2, 2, max_iter=20000, tol=1e-14, rng=seed)
    assert est.norm == pytest.approx(np.linalg.svd(M, compute_uv=False)[0], rel=1e-6)


def test_measure_operator_matches_svd():
    m = discretize_nu(np.array([[1.0, 0.3], [0.3, -0.5]]), 0.5, TINY)
    T = measure_operator(m, TINY)
    sigma = np.linalg.svd(materialize(T), compute_uv=False)[0]
    est = estimate_norm_pq(T, 2, 2, max_iter=20000, tol=1e-14)
    assert est.converged
    assert est.norm == pytest.approx(sigma, rel=1e-6)


def test_adjoint_consistency_for_constructed_operators():
    rng = np.random.default_rng(0)
    g = GridSpec(1, 2.0, 16, 2.0, 16)
    ops = [measure_operator(discretize_nu(np.eye(2), 0, g), g),
           measure_operator(discretize_mu(np.diag([1.0, -2.0]), g, 1.5), g),
           measure_operator(discretize_nu(np.array([[0.2, 0.9], [0.9, 0.4]]), 1, g), g)]
    for T in ops:
        worst = max(adjoint_defect(T, rng.standard_normal(T.shape), rng.standard_normal(T.shape))
                    for _ in range(100))
        assert worst <= 1e-6


def test_homogeneity():
    m = discretize_nu(np.eye(2), 0, TINY)
    base = estimate_norm_pq(measure_operator(m, TINY), 1.5, 3).norm
    scaled = estimate_norm_pq(measure_operator(m.scaled(4.0), TINY), 1.5, 3).norm
    assert scaled == pytest.approx(4.0 * base, rel=1e-9)
    assert estimate_norm_pq(measure_operator(m, TINY).scaled(-2.0), 1.5, 3).norm == pytest.approx(2 * base, rel=1e-9)


def test_monotone_in_measure():
    small = discretize_nu(np.eye(2), 0, TINY)
    big = discretize_mu(np.eye(2), TINY, 2.0)
    for p, q in ((2, 2), (1.5, 3)):
        a = estimate_norm_pq(measure_operator(small, TINY), p, q, max_iter=200, tol=1e-10).norm
        b = estimate_norm_pq(measure_operator(big, TINY), p, q, max_iter=200, tol=1e-10).norm
        assert a <= b


def test_endpoint_exponents_rejected():
    T = measure_operator(identity_measure(1), TINY)
    for p, q in ((1, 2), (2, np.inf), (0.5, 2)):
        with pytest.raises(ValueError):
            estimate_norm_pq(T, p, q)


def test_bound_11():
    assert bound_11(identity_measure(1, 0.3)) == 0.3
    g = GridSpec(1, 2.0, 32, 1.0, 8)
    assert bound_11(discretize_nu(np.eye(2), 0, g)) <= bound_11(discretize_mu(np.eye(2), g, 2.0))


def test_estimator_below_total_mass_on_diagonal():
    m = discretize_nu(np.eye(2), 0, TINY)
    assert estimate_norm_pq(measure_operator(m, TINY), 2, 2).norm <= bound_11(m) * (1 + 1e-12)


# --- classification

def test_classify_slope_bands():
    assert classify_slope(0.05) == "bounded"
    assert classify_slope(0.25) == "inconclusive"
    assert classify_slope(0.5) == "unbounded"


def test_refine_needs_three_halving_grids():
    with pytest.raises(ValueError):
        refine_and_classify(nu0_operator, SCAN_GRIDS[:2], 2, 2)
    with pytest.raises(ValueError):
        refine_and_classify(nu0_operator, [SCAN_GRIDS[0], SCAN_GRIDS[2], SCAN_GRIDS[2].refined()], 2, 2)


@pytest.mark.parametrize("pt,expected", [((0.5, 0.5), "bounded"), ((0.7, 0.3), "bounded"),
                                         ((0.95, 0.05), "unbounded")])
def test_reference_classifications(pt, expected):
    est = refine_and_classify(nu0_operator, SCAN_GRIDS, 1 / pt[0], 1 / pt[1])
    assert est.classification == expected


def test_unconverged_estimates_are_inconclusive():
    est = refine_and_classify(nu0_operator, SCAN_GRIDS, 2, 2, max_iter=1, tol=1e-12)
    assert est.classification == "inconclusive"


def test_theory_member_closed_for_gamma_zero_open_otherwise():
    D0 = ExponentPoint(F(3, 4), F(1, 4))
    assert theory_member(RegionSpec(1), D0)
    r = RegionSpec(1, 1)
    assert not theory_member(r, ExponentPoint(F(7, 8), F(5, 8)))
    assert theory_member(r, ExponentPoint(F(3, 4), F(9, 16)))


def test_scan_is_deterministic_and_dual_pairs_agree():
    r = RegionSpec(1)
    pts = [ExponentPoint(F(19, 20), F(1, 5)), ExponentPoint(F(4, 5), F(1, 20))]  # a dual pair
    first = scan_typeset(r, pts, nu0_operator, SCAN_GRIDS, rng=5)
    second = scan_typeset(r, pts, nu0_operator, SCAN_GRIDS, rng=5)
    assert first.to_csv() == second.to_csv()
    assert first.summary_json() == second.summary_json()
    a, b = first.samples
    assert a.classification == b.classification == "unbounded"
    assert first.agreement == 2
    assert first.to_csv().splitlines()[0].split(",")[:2] == ["inv_p", "inv_q"]


def test_scan_rejects_square_boundary():
    with pytest.raises(ValueError):
        scan_typeset(RegionSpec(1), [ExponentPoint(1, 0)], nu0_operator, SCAN_GRIDS)


# --- dilations

@pytest.mark.parametrize("ip,iq", [(0.75, 0.25), (0.5, 0.5), (0.6, 0.4)])
def test_dilation_exponent_recovered(ip, iq):
    A = np.eye(2)
    slope, _ = dilation_slope(lambda g, d: discretize_mu(A, g, 1.0 / d), GridSpec(1, 2.0, 16, 4.0, 16),
                              1 / ip, 1 / iq, max_iter=100, tol=1e-8)
    assert slope == pytest.approx(predicted_dilation_slope(1, 1 / ip, 1 / iq), abs=0.15)


def test_dilation_slope_vanishes_only_on_scaling_line():
    assert predicted_dilation_slope(1, 4 / 3, 4) == pytest.approx(0, abs=1e-14)
    assert predicted_dilation_slope(1, 2, 2) == -2
