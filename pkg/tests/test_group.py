import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from heisenlab.group import (DegenerateMatrixError, GroupElement, det_perturbed, dilate, group_inv, group_mul,
                             is_nondegenerate, lemma1_diagonal, make_j, matrix_from_json, matrix_to_json, phi,
                             symmetrize, symplectic)

finite = st.floats(-50, 50, allow_nan=False)


def element(n):
    return st.builds(lambda x, t: GroupElement(np.array(x), t),
                     st.lists(finite, min_size=2 * n, max_size=2 * n), finite)


def close(a: GroupElement, b: GroupElement, rel=1e-12):
    va, vb = np.r_[a.x, a.t], np.r_[b.x, b.t]
    return np.all(np.abs(va - vb) <= rel * np.maximum(1.0, np.abs(vb)))


# --- J

def test_make_j_n1():
    assert make_j(1).tolist() == [[0, 1], [-1, 0]]


def test_make_j_n2_blocks():
    J = make_j(2)
    expected = np.zeros((4, 4), dtype=int)
    expected[0, 2] = expected[1, 3] = 1
    expected[2, 0] = expected[3, 1] = -1
    assert np.array_equal(J, expected)


@pytest.mark.parametrize("n", range(1, 7))
def test_j_square_and_skew_exact(n):
    J = make_j(n)
    assert J.dtype.kind == "i"
    assert np.array_equal(J @ J, -np.eye(2 * n, dtype=int))
    assert np.array_equal(J.T, -J)


def test_make_j_rejects_bad_n():
    with pytest.raises(ValueError):
        make_j(0)


# --- symplectic form

def test_symplectic_basis_pair():
    assert symplectic([1, 0], [0, 1]) == 1


def test_symplectic_dimension_mismatch():
    with pytest.raises(ValueError):
        symplectic([1, 0], [0, 1, 0, 0])


@given(arrays(float, 4, elements=finite), arrays(float, 4, elements=finite))
def test_symplectic_alternating_and_antisymmetric(x, y):
    assert symplectic(x, x) == 0
    assert symplectic(x, y) == -symplectic(y, x)


# --- group law

def test_group_mul_worked_example():
    g = group_mul(GroupElement([1, 0], 2), GroupElement([0, 1], 3))
    assert g.x.tolist() == [1, 1] and g.t == 6


def test_group_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        group_mul(GroupElement([1, 0], 0), GroupElement([1, 0, 0, 0], 0))


def test_inverse_examples():
    assert group_inv(GroupElement.identity(1)) == GroupElement.identity(1)
    g = group_inv(GroupElement([1, 2], 3))
    assert g.x.tolist() == [-1, -2] and g.t == -3


@settings(max_examples=200)
@given(element(2))
def test_identity_inverse_involution(g):
    e = GroupElement.identity(2)
    assert close(group_mul(e, g), g) and close(group_mul(g, e), g)
    h = group_mul(g, group_inv(g))
    assert np.all(h.x == 0) and h.t == 0
    assert close(group_inv(group_inv(g)), g)


@settings(max_examples=200)
@given(element(1), element(1), element(1))
def test_associativity(a, b, c):
    assert close((a * b) * c, a * (b * c), rel=1e-9)


@settings(max_examples=200)
@given(st.floats(0.1, 10), element(2), element(2))
def test_dilation_is_automorphism(delta, a, b):
    assert close(dilate(delta, a * b), dilate(delta, a) * dilate(delta, b), rel=1e-9)


def test_dilation_examples():
    g = GroupElement([1.0, 1.0], 1.0)
    assert dilate(1, g) == g
    d = dilate(2, g)
    assert d.x.tolist() == [2, 2] and d.t == 4
    with pytest.raises(ValueError):
        dilate(0, g)


def test_group_element_rejects_odd_dimension():
    with pytest.raises(ValueError):
        GroupElement([1, 2, 3], 0)


# --- quadratic form and determinants

def test_phi_examples():
    assert phi(np.eye(2), [1, 2]) == 5
    assert phi(np.zeros((2, 2)), [3, -4]) == 0
    with pytest.raises(ValueError):
        phi(np.eye(2), [1, 2, 3, 4])


@given(arrays(float, (2, 2), elements=st.floats(-5, 5)), arrays(float, 2, elements=finite))
def test_phi_is_even(A, y):
    A = symmetrize(A)
    assert phi(A, -y) == phi(A, y)


def test_phi_stack_matches_loop():
    rng = np.random.default_rng(1)
    A = symmetrize(rng.standard_normal((4, 4)))
    ys = rng.standard_normal((10, 4))
    assert np.allclose(phi(A, ys), [y @ A @ y for y in ys])


def test_symmetrize_keeps_quadratic_form():
    rng = np.random.default_rng(2)
    B = rng.standard_normal((4, 4))
    y = rng.standard_normal(4)
    assert np.isclose(phi(symmetrize(B), y), y @ B @ y)


def test_det_perturbed_examples():
    assert np.isclose(det_perturbed(np.eye(2), +1), 5.0)
    assert abs(det_perturbed(np.diag([0.5, -0.5]), +1)) < 1e-12


@given(arrays(float, (4, 4), elements=st.floats(-5, 5)))
def test_det_sign_symmetry(B):
    A = symmetrize(B)
    dp, dm = det_perturbed(A, +1), det_perturbed(A, -1)
    assert abs(dp - dm) <= 1e-9 * max(1.0, abs(dp))


def test_lemma1_examples():
    assert np.isclose(lemma1_diagonal(np.diag([2.0, 3.0])), 7.0)
    assert lemma1_diagonal(np.zeros((4, 4))) == 1.0
    with pytest.raises(ValueError):
        lemma1_diagonal(np.ones((2, 2)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_lemma1_against_generic_determinant(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        D = np.diag(rng.uniform(-5, 5, 2 * n))
        closed = lemma1_diagonal(D)
        # det_perturbed works with 2A, so feed it A/2
        for sign in (+1, -1):
            generic = det_perturbed(D / 2, sign)
            assert abs(closed - generic) <= 1e-10 * max(1.0, abs(generic))


def test_is_nondegenerate_examples():
    assert is_nondegenerate(np.eye(2))
    assert not is_nondegenerate(np.diag([0.5, -0.5]))
    assert is_nondegenerate(np.zeros((2, 2)))
    assert issubclass(DegenerateMatrixError, ValueError)


def test_matrix_json_round_trip():
    A = np.array([[1.0, 0.25], [0.25, -2.0]])
    assert np.array_equal(matrix_from_json(matrix_to_json(A)), A)
