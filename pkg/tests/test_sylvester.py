import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matfun.errors import NotConverged, ProblemTooLarge, ShapeMismatch, \
    SingularMatrix
from matfun.sylvester import KRONECKER_MAX_N, SylvesterProblem, \
    frechet_direct, reference_value, solve_sylvester

from oracles import central_difference, polar_oracle, rel, \
    sign_frechet_oracle, sign_oracle, sqrt_frechet_oracle, sqrt_oracle


def test_identity_coefficient():
    X = solve_sylvester(np.eye(2), np.diag([4.0, 8.0]))
    np.testing.assert_allclose(X, np.diag([2.0, 4.0]), rtol=1e-15)


def test_diagonal_closed_form():
    X = solve_sylvester(np.diag([1.0, 2.0]), np.ones((2, 2)))
    np.testing.assert_allclose(X, [[0.5, 1 / 3], [1 / 3, 0.25]], rtol=1e-14)


def test_spd_residual():
    rng = np.random.default_rng(1)
    B = rng.standard_normal((5, 5))
    S = B @ B.T + np.eye(5)
    C = rng.standard_normal((5, 5))
    p = SylvesterProblem(S, C)
    assert p.residual(p.solve()) < 1e-11


def test_complex_coefficients():
    rng = np.random.default_rng(2)
    S = np.diag([1 + 1j, 2 - 0.5j, 3.0]) + 0.1 * rng.standard_normal((3, 3))
    C = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    X = solve_sylvester(S, C)
    assert np.linalg.norm(S @ X + X @ S - C) < 1e-12 * np.linalg.norm(C)


def test_shared_spectrum_is_singular():
    # eigenvalues 1 and -1 make S X + X S = C singular
    with pytest.raises(SingularMatrix):
        solve_sylvester(np.diag([1.0, -1.0]), np.ones((2, 2)))


def test_size_cap():
    n = KRONECKER_MAX_N + 1
    with pytest.raises(ProblemTooLarge):
        solve_sylvester(np.eye(n), np.eye(n))


def test_shape_checks():
    with pytest.raises(ShapeMismatch):
        SylvesterProblem(np.eye(2), np.eye(3))
    with pytest.raises(ShapeMismatch):
        SylvesterProblem(np.ones((2, 3)), np.ones((2, 3)))


# -- reference values ----------------------------------------------------------

def test_reference_sign():
    np.testing.assert_allclose(reference_value('sign', np.diag([3.0, -5.0])),
                               np.diag([1.0, -1.0]), atol=1e-15)


def test_reference_sqrt():
    np.testing.assert_allclose(reference_value('sqrt', np.diag([4.0, 9.0])),
                               np.diag([2.0, 3.0]), rtol=1e-14)


def test_reference_polar_of_scaled_rotation():
    c, s = math.cos(0.3), math.sin(0.3)
    R = np.array([[c, -s], [s, c]])
    np.testing.assert_allclose(reference_value('polar', 2 * R), R,
                               atol=1e-15)


def test_references_match_scipy():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((8, 8))
    assert rel(reference_value('sign', A), sign_oracle(A)) < 1e-12
    B = A @ A.T + np.eye(8)
    assert rel(reference_value('sqrt', B), sqrt_oracle(B)) < 1e-12
    assert rel(reference_value('invsqrt', B),
               np.linalg.inv(sqrt_oracle(B))) < 1e-12
    R = rng.standard_normal((9, 5))
    assert rel(reference_value('polar', R), polar_oracle(R)) < 1e-12


def test_reference_fails_without_sign():
    with pytest.raises((NotConverged, SingularMatrix)):
        reference_value('sign', np.array([[0.0, 1.0], [-1.0, 0.0]]))


def test_reference_unknown_kind():
    with pytest.raises(ValueError):
        reference_value('log', np.eye(2))


# -- direct derivatives --------------------------------------------------------

def test_sqrt_derivative_of_scaled_identity():
    np.testing.assert_allclose(frechet_direct('sqrt', 4 * np.eye(2),
                                              np.eye(2)),
                               np.eye(2) / 4, rtol=1e-14)


def test_sign_derivative_swaps_eigenvectors():
    K = np.array([[0.0, 1.0], [1.0, 0.0]])
    A = np.diag([1.0, -1.0])
    L = frechet_direct('sign', A, K)
    np.testing.assert_allclose(L, sign_frechet_oracle(A, K), atol=1e-14)
    np.testing.assert_allclose(L, K, atol=1e-14)


def test_sign_derivative_at_identity_vanishes():
    E = np.random.default_rng(4).standard_normal((2, 2))
    np.testing.assert_allclose(frechet_direct('sign', np.eye(2), E),
                               np.zeros((2, 2)), atol=1e-15)


def test_polar_derivative_at_identity():
    S = np.array([[1.0, 2.0], [2.0, -1.0]])
    K = np.array([[0.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_allclose(frechet_direct('polar', np.eye(2), S),
                               np.zeros((2, 2)), atol=1e-14)
    np.testing.assert_allclose(frechet_direct('polar', np.eye(2), K), K,
                               atol=1e-14)
    fd = central_difference(polar_oracle, np.eye(2), K, 1e-5)
    np.testing.assert_allclose(fd, K, atol=1e-8)


def test_derivatives_match_eigen_oracles():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((7, 7))
    E = rng.standard_normal((7, 7))
    assert rel(frechet_direct('sign', A, E), sign_frechet_oracle(A, E)) < 1e-9
    B = A @ A.T + np.eye(7)
    assert rel(frechet_direct('sqrt', B, E), sqrt_frechet_oracle(B, E)) < 1e-9


def test_rectangular_polar_derivative_vs_differences():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((7, 4))
    E = rng.standard_normal((7, 4))
    L = frechet_direct('polar', A, E)
    assert rel(L, central_difference(polar_oracle, A, E, 1e-5)) < 1e-8


@pytest.mark.parametrize('kind', ['sign', 'sqrt', 'polar'])
def test_difference_error_is_quadratic(kind):
    rng = np.random.default_rng(7)
    A = rng.standard_normal((6, 6))
    if kind == 'sqrt':
        A = A @ A.T + np.eye(6)
    E = rng.standard_normal((6, 6))
    L = frechet_direct(kind, A, E)
    F = lambda X: reference_value(kind, X)
    errs = [rel(central_difference(F, A, E, t), L) for t in (1e-3, 1e-4)]
    assert 50 <= errs[0] / errs[1] <= 200


@pytest.mark.parametrize('kind', ['sign', 'sqrt', 'polar'])
def test_definition_remainder_vanishes(kind):
    rng = np.random.default_rng(8)
    A = rng.standard_normal((5, 5))
    if kind == 'sqrt':
        A = A @ A.T + np.eye(5)
    E = rng.standard_normal((5, 5))
    L = frechet_direct(kind, A, E)
    F0 = reference_value(kind, A)
    ratios = []
    for s in (1e-2, 1e-3, 1e-4):
        r = reference_value(kind, A + s * E) - F0 - s * L
        ratios.append(np.linalg.norm(r) / (s * np.linalg.norm(E)))
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[2] < 1e-3


def test_sign_from_inverse_square_root():
    A = np.random.default_rng(9).standard_normal((6, 6))
    S = reference_value('sign', A)
    W = reference_value('invsqrt', A @ A)
    assert rel(A @ W, S) < 1e-10


def test_shape_mismatch_and_complex_polar():
    with pytest.raises(ShapeMismatch):
        frechet_direct('sign', np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        frechet_direct('polar', np.eye(2) * 1j + np.eye(2), np.eye(2))


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 10), st.integers(0, 2 ** 32 - 1),
       st.floats(-3, 3), st.floats(-3, 3))
def test_linearity_in_direction(n, seed, a, b):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    A = B @ B.T / n + np.eye(n)
    E1, E2 = rng.standard_normal((2, n, n))
    for kind in ('sign', 'sqrt', 'polar'):
        lhs = frechet_direct(kind, A, a * E1 + b * E2)
        rhs = a * frechet_direct(kind, A, E1) + b * frechet_direct(kind, A, E2)
        scale = max(np.linalg.norm(rhs), np.linalg.norm(lhs), 1e-300)
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(scale, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_sylvester_residual_property(n, seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    S = B @ B.T / n + 0.5 * np.eye(n)
    C = rng.standard_normal((n, n))
    assert SylvesterProblem(S, C).residual(solve_sylvester(S, C)) <= 1e-11
