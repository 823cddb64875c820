import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matfun.errors import GenerationFailed, ShapeMismatch
from matfun.groups import GROUP_KINDS, GenSpec, GroupForm, cayley, \
    group_form, group_residual, lie_element, random_automorphism, \
    random_direction
from matfun.linalg import cond_estimate, solve_linear
from matfun.sylvester import reference_value


def _forms(n):
    forms = [GroupForm.pseudo_orthogonal(n // 2, n - n // 2),
             GroupForm.perplectic(n), GroupForm.orthogonal(n)]
    if n % 2 == 0:
        forms.append(GroupForm.symplectic(n))
    return forms


@pytest.mark.parametrize('n', [2, 3, 6])
def test_form_matrices(n):
    for g in _forms(n):
        M = g.M
        if g.kind == 'symplectic':
            np.testing.assert_array_equal(M.T, -M)
            np.testing.assert_array_equal(M @ M, -np.eye(n))
        else:
            np.testing.assert_array_equal(M.T, M)
            np.testing.assert_array_equal(M @ M, np.eye(n))


def test_identity_is_in_every_group():
    for g in _forms(4):
        assert group_residual(np.eye(4), g) == 0


def test_scaled_identity_residual():
    n = 5
    r = group_residual(2 * np.eye(n), GroupForm.orthogonal(n))
    assert r == pytest.approx(3 * math.sqrt(n), rel=1e-15)


def test_residual_shape_check():
    with pytest.raises(ShapeMismatch):
        group_residual(np.eye(3), GroupForm.orthogonal(4))


def test_odd_symplectic_rejected():
    with pytest.raises(ShapeMismatch, match='even n'):
        GroupForm.symplectic(3)
    with pytest.raises(ValueError, match='even n'):
        GenSpec('symplectic', 3, 10, 0)


def test_default_signature():
    g = group_form('pseudo_orthogonal', 5)
    assert (g.p, g.q) == (3, 2)


def test_hyperbolic_rotation():
    s = 0.3
    G = cayley(np.array([[0.0, s], [s, 0.0]]))
    c = (1 + s * s) / (1 - s * s)
    sh = -2 * s / (1 - s * s)
    np.testing.assert_allclose(G, [[c, sh], [sh, c]], rtol=1e-15)
    assert c * c - sh * sh == pytest.approx(1.0, abs=1e-14)
    assert group_residual(G, GroupForm.pseudo_orthogonal(1, 1)) < 1e-15


@pytest.mark.parametrize('g', _forms(6), ids=lambda g: g.kind)
def test_cayley_of_lie_element(g):
    K = np.random.default_rng(1).standard_normal((6, 6))
    S = lie_element(g, K)
    assert np.linalg.norm(S.T @ g.M + g.M @ S) < 1e-14
    assert group_residual(cayley(0.3 * S), g) < 1e-13


def test_small_symplectic_generation():
    spec = GenSpec('symplectic', 4, 1, 0)
    assert group_residual(random_automorphism(spec), spec.form) <= 1e-12


@pytest.mark.parametrize('kind', GROUP_KINDS)
@pytest.mark.parametrize('n,target', [(10, 20), (50, 80)])
def test_generator_contract(kind, n, target):
    spec = GenSpec(kind, n, target, 42)
    G = random_automorphism(spec)
    assert group_residual(G, spec.form) <= 1e-12
    if kind != 'orthogonal':
        assert target / 2 <= cond_estimate(G) <= 5 * target


def test_generator_is_deterministic():
    spec = GenSpec('perplectic', 12, 30, 2 ** 63 + 5)
    a = random_automorphism(spec)
    b = random_automorphism(spec)
    assert a.tobytes() == b.tobytes()
    c = random_automorphism(GenSpec('perplectic', 12, 30, 6))
    assert not np.array_equal(a, c)


@pytest.mark.parametrize('kind', ['symplectic', 'pseudo_orthogonal',
                                  'perplectic'])
@pytest.mark.parametrize('n', [5, 6, 8, 12, 50])
def test_generator_mixes_half_planes(kind, n):
    if kind == 'symplectic' and n % 2:
        n += 1
    for seed in range(6):
        G = random_automorphism(GenSpec(kind, n, 2 * n, seed))
        re = np.linalg.eigvals(G).real
        assert (re < 0).any() and (re > 0).any()


def test_unreachable_conditioning():
    with pytest.raises(GenerationFailed):
        random_automorphism(GenSpec('symplectic', 50, 5, 0))


@pytest.mark.parametrize('bad', [
    dict(kind='unitary', n=4, target_cond=2, seed=0),
    dict(kind='orthogonal', n=1, target_cond=2, seed=0),
    dict(kind='orthogonal', n=4, target_cond=0.5, seed=0),
    dict(kind='orthogonal', n=4, target_cond=2, seed=-1),
    dict(kind='orthogonal', n=4, target_cond=2, seed=2 ** 64),
])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        GenSpec(**bad)


@pytest.mark.parametrize('kind', ['symplectic', 'pseudo_orthogonal',
                                  'perplectic'])
def test_closure_and_inverse(kind):
    spec = GenSpec(kind, 10, 20, 3)
    G = random_automorphism(spec)
    H = random_automorphism(GenSpec(kind, 10, 20, 4))
    assert group_residual(G @ H, spec.form) <= 1e-10
    assert group_residual(solve_linear(G, np.eye(10)), spec.form) <= 1e-10


@pytest.mark.parametrize('kind', ['symplectic', 'pseudo_orthogonal',
                                  'perplectic'])
def test_function_values_keep_structure(kind):
    spec = GenSpec(kind, 10, 20, 5)
    G = random_automorphism(spec)
    for f in ('sign', 'sqrt', 'polar'):
        assert group_residual(reference_value(f, G), spec.form) <= 1e-8


def test_random_direction():
    E = random_direction(4, 3, 9)
    assert E.shape == (4, 3)
    assert ((0 <= E) & (E < 1)).all()
    np.testing.assert_array_equal(E, random_direction(4, 3, 9))
    assert np.linalg.norm(E) > 0


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(GROUP_KINDS), st.integers(2, 12),
       st.integers(0, 2 ** 64 - 1))
def test_generated_matrices_are_automorphisms(kind, n, seed):
    if kind == 'symplectic' and n % 2:
        n += 1
    spec = GenSpec(kind, n, 2 * n, seed)
    G = random_automorphism(spec)
    assert group_residual(G, spec.form) <= 1e-12
