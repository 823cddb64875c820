"""
Direct Fréchet derivatives of sign, square root and polar factor.

The derivatives reduce to Sylvester equations ``S X + X S = C`` which are
solved densely through their Kronecker form.  Function values come from
tight-tolerance Newton-family iterations and are accepted only after a
residual certificate, so no eigensolver is involved anywhere.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NotConverged, ProblemTooLarge, ShapeMismatch
from .iterations import IterOptions, db_step, polar_newton_step, \
    run_iteration, sign_newton_step
from .linalg import as_matrix, eye_like, frob_norm, inverse, solve_linear

__all__ = ['KRONECKER_MAX_N', 'SylvesterProblem', 'solve_sylvester',
           'reference_value', 'frechet_direct']

KRONECKER_MAX_N = 60
REFERENCE_TOL = 1e-14
CERTIFY_TOL = 1e-12


@dataclass(frozen=True)
class SylvesterProblem:
    """The equation ``S X + X S = C`` with square ``S`` and ``C``."""
    S: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        S = as_matrix(self.S, 'S', square=True)
        C = as_matrix(self.C, 'C', square=True)
        if S.shape != C.shape:
            raise ShapeMismatch(f'S is {S.shape} but C is {C.shape}')
        object.__setattr__(self, 'S', S)
        object.__setattr__(self, 'C', C)

    def residual(self, X):
        """Relative residual ``||S X + X S - C||_F / ||C||_F``."""
        r = frob_norm(self.S @ X + X @ self.S - self.C)
        c = frob_norm(self.C)
        return r / c if c else r

    def solve(self):
        return solve_sylvester(self.S, self.C)


def solve_sylvester(S, C):
    """
    Solve ``S X + X S = C`` through ``(I kron S + S^T kron I) vec(X) = vec(C)``.

    Cost is O(n^6), so ``n`` is capped at ``KRONECKER_MAX_N``.

    Raises
    ------
    ProblemTooLarge
    SingularMatrix
        The spectra of ``S`` and ``-S`` intersect.
    """
    p = SylvesterProblem(S, C)
    n = p.S.shape[0]
    if n > KRONECKER_MAX_N:
        raise ProblemTooLarge(f'Kronecker Sylvester solve limited to '
                              f'n <= {KRONECKER_MAX_N}, got n = {n}')
    I = eye_like(p.S)
    K = np.kron(I, p.S) + np.kron(p.S.T, I)
    x = solve_linear(K, p.C.reshape(-1, order='F'))
    return x.reshape((n, n), order='F')


def _certify(kind, A, X):
    if kind == 'sign':
        scale = frob_norm(X) ** 2
        res = frob_norm(X @ X - eye_like(X)) / scale
        comm = frob_norm(X @ A - A @ X) / (frob_norm(X) * frob_norm(A))
        return max(res, comm)
    if kind == 'sqrt':
        return frob_norm(X @ X - A) / frob_norm(A)
    if kind == 'invsqrt':
        return (frob_norm(X @ X @ A - eye_like(A))
                / (frob_norm(X) ** 2 * frob_norm(A)))
    return frob_norm(X.T @ X - eye_like(X, X.shape[1]))


def reference_value(kind, A):
    """
    High-accuracy ``F(A)`` certified by its defining residual.

    Newton (sign, polar) or Denman-Beavers (sqrt, invsqrt) runs until the
    relative step change drops below ``1e-14``.  The result is accepted
    only if its residual, scaled like a backward error, is below
    ``1e-12``.

    Parameters
    ----------
    kind : {'sign', 'sqrt', 'invsqrt', 'polar'}
    A : array_like
        Real or complex; ``polar`` uses the transpose flavour.

    Returns
    -------
    ndarray

    Raises
    ------
    NotConverged
        The iteration failed or its result did not pass certification.
    """
    A = as_matrix(A, square=(kind != 'polar'))
    if kind == 'sign':
        start, update = (A,), lambda s: (sign_newton_step(s[0]),)
    elif kind in ('sqrt', 'invsqrt'):
        start, update = (A, eye_like(A)), lambda s: db_step(*s)
    elif kind == 'polar':
        if A.shape[0] < A.shape[1]:
            raise ShapeMismatch(f'polar needs rows >= cols, got {A.shape}')
        start, update = (A,), lambda s: (polar_newton_step(s[0]),)
    else:
        raise ValueError(f'unknown kind {kind!r}')
    # only the step change gates the loop; acceptance is the certificate
    state, _ = run_iteration(
        update, start, lambda s: s[0], lambda s: 0.0,
        IterOptions(tol=REFERENCE_TOL, max_iter=200),
        label=f'reference {kind}')
    X = state[1] if kind == 'invsqrt' else state[0]
    defect = _certify(kind, A, X)
    if not defect <= CERTIFY_TOL:
        raise NotConverged(f'reference {kind} failed certification: '
                           f'defect {float(defect):.3e} > {CERTIFY_TOL:.0e}',
                           reason='certification')
    return X


def frechet_direct(kind, A, E):
    """
    Fréchet derivative ``L_F(A, E)`` through one Sylvester solve.

    ``sqrt`` solves ``A^{1/2} X + X A^{1/2} = E``.  For ``sign`` and
    ``polar`` the product rule applied to ``F(A) = A B(A)^{1/2}`` with
    ``B = (A^2)^{-1}`` or ``(A^T A)^{-1}`` gives
    ``L = E B^{1/2} + A X`` where ``B^{1/2} X + X B^{1/2} = -C`` and
    ``C = B (A E + E A) B`` or ``B (A^T E + E^T A) B``.

    Parameters
    ----------
    kind : {'sign', 'sqrt', 'polar'}
    A : array_like
        ``polar`` accepts real ``m x n`` with ``m >= n`` and full rank.
    E : array_like
        Same shape as ``A``.
    """
    A = as_matrix(A, square=(kind != 'polar'))
    E = as_matrix(E, 'E')
    if E.shape != A.shape:
        raise ShapeMismatch(f'E is {E.shape} but A is {A.shape}')
    if kind == 'sqrt':
        return solve_sylvester(reference_value('sqrt', A), E)
    if kind == 'sign':
        G = A @ A
        dG = A @ E + E @ A
    elif kind == 'polar':
        if np.iscomplexobj(A) or np.iscomplexobj(E):
            raise ValueError('direct polar derivative is defined for real '
                             'A and E only')
        if A.shape[0] < A.shape[1]:
            raise ShapeMismatch(f'polar needs rows >= cols, got {A.shape}')
        G = A.T @ A
        dG = A.T @ E + E.T @ A
    else:
        raise ValueError(f'unknown kind {kind!r}')
    B = inverse(G)
    B_half = reference_value('invsqrt', G)
    X = solve_sylvester(B_half, -(B @ dG @ B))
    return E @ B_half + A @ X
