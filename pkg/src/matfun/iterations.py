"""
Newton and Padé iterations for the matrix sign, square root and polar factor.

Every evaluator returns its result together with an :class:`IterationTrace`.
The single-step update functions (``*_step``) are public because the
Fréchet/complex-step module drives the very same updates with complex
arguments.
"""
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import InsufficientData, NotConverged, SingularMatrix, \
    UnsupportedOrder
from .linalg import adjoint, as_matrix, eye_like, frob_norm, inverse, \
    machine_eps, solve_linear, solve_right

__all__ = ['IterOptions', 'IterationTrace', 'check_order',
           'PADE_NUMERATOR', 'PADE_DENOMINATOR', 'poly_eval', 'poly_frechet',
           'pade_rational', 'pade_rational_apply',
           'sign_newton_step', 'sqrt_newton_step', 'db_step',
           'polar_newton_step', 'sign_pade_step', 'sqrt_pade_step',
           'polar_pade_step', 'sign_residual', 'sqrt_residual',
           'sqrt_pair_residual', 'polar_residual', 'run_iteration',
           'newton_sign', 'newton_sqrt', 'db_sqrt', 'newton_polar',
           'pade_sign', 'pade_sqrt', 'pade_polar',
           'estimate_order', 'order_from_errors']

# [l/l] Padé approximant to (1 - xi)^(-1/2) written as polynomials in
# W = I - xi (W = X^2, Z Y or X^T X), ascending powers.
PADE_NUMERATOR = {1: (3.0, 1.0), 2: (5.0, 10.0, 1.0)}
PADE_DENOMINATOR = {1: (1.0, 3.0), 2: (1.0, 10.0, 5.0)}

DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class IterOptions:
    """
    Stopping controls shared by all iterations.

    Parameters
    ----------
    tol : float
        Relative step-change tolerance.  The kind-specific residual must
        also drop below ``10 * tol``.
    max_iter : int
    record_trace : bool
        Keep a copy of every iterate in the returned trace.
    """
    tol: float = 1e-8
    max_iter: int = 100
    record_trace: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f'tol must be positive, got {self.tol}')
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f'max_iter must be a positive integer, '
                             f'got {self.max_iter}')


@dataclass(frozen=True)
class IterationTrace:
    """
    Per-step record of an iteration; entry ``k`` describes iterate ``k``.

    ``steps[0]`` is NaN since there is no previous iterate.
    """
    steps: tuple
    residuals: tuple
    group_residuals: tuple = None
    iterates: tuple = None
    derivative_steps: tuple = None
    derivative_iterates: tuple = None
    converged: bool = False

    @property
    def iterations(self):
        return len(self.steps) - 1

    def __len__(self):
        return len(self.steps)


def check_order(ell):
    if isinstance(ell, bool) or ell not in (1, 2):
        raise UnsupportedOrder(
            f'Padé order {ell!r} unsupported; only 1 (cubic) and 2 (quintic) '
            f'are numerically reliable')
    return int(ell)


# -- polynomial and rational kernels -----------------------------------------

def poly_eval(coeffs, W):
    """Horner evaluation of ``sum c_j W^j``."""
    I = eye_like(W)
    P = coeffs[-1] * I
    for c in coeffs[-2::-1]:
        P = c * I + W @ P
    return P


def poly_frechet(coeffs, W, dW):
    """Fréchet derivative of ``W -> sum c_j W^j`` in direction ``dW``."""
    I = eye_like(W)
    P = coeffs[-1] * I
    dP = np.zeros_like(P) if P.dtype != object else 0 * P
    for c in coeffs[-2::-1]:
        dP = dW @ P + W @ dP
        P = c * I + W @ P
    return dP


def pade_rational(W, ell):
    """
    Evaluate ``r_ll(I - W) = q_l(W)^{-1} p_l(W)``.

    ``p_l`` and ``q_l`` commute, so the left and right quotients agree.

    Raises
    ------
    SingularMatrix
        When ``q_l(W)`` is numerically singular.
    """
    ell = check_order(ell)
    W = as_matrix(W, 'W', square=True)
    p = poly_eval(PADE_NUMERATOR[ell], W)
    q = poly_eval(PADE_DENOMINATOR[ell], W)
    return solve_linear(q, p)


def pade_rational_apply(X, W, ell):
    """Return ``X r_ll(I - W)``."""
    return X @ pade_rational(W, ell)


# -- single updates ----------------------------------------------------------

def sign_newton_step(X):
    return 0.5 * (X + inverse(X))


def sqrt_newton_step(X, A):
    return 0.5 * (X + solve_linear(X, A))


def db_step(Y, Z):
    return 0.5 * (Y + inverse(Z)), 0.5 * (Z + inverse(Y))


def polar_newton_step(X, flavor='transpose'):
    if X.shape[0] == X.shape[1]:
        return 0.5 * (X + adjoint(inverse(X), flavor))
    return 0.5 * (X + solve_right(X, adjoint(X, flavor) @ X))


def sign_pade_step(X, ell):
    return X @ pade_rational(X @ X, ell)


def sqrt_pade_step(Y, Z, ell):
    r = pade_rational(Z @ Y, ell)
    return Y @ r, r @ Z


def polar_pade_step(X, ell, flavor='transpose'):
    return X @ pade_rational(adjoint(X, flavor) @ X, ell)


# -- residuals ---------------------------------------------------------------

def sign_residual(X):
    """``||X^2 - I||_F / ||X||_F^2`` (unscaled when ``X = 0``)."""
    scale = frob_norm(X) ** 2
    return frob_norm(X @ X - eye_like(X)) / (scale if scale else 1)


def sqrt_residual(X, A):
    return frob_norm(X @ X - A) / frob_norm(A)


def sqrt_pair_residual(Y, Z, A):
    return max(frob_norm(Z @ Y - eye_like(Y)), sqrt_residual(Y, A))


def polar_residual(X, flavor='transpose'):
    return frob_norm(adjoint(X, flavor) @ X - eye_like(X, X.shape[1]))


def _group_residual(X, M):
    if X.shape != M.shape:
        return math.nan
    return frob_norm(X.T @ M @ X - M)


# -- controller --------------------------------------------------------------

def _rel_change(new, old):
    if isinstance(new, tuple):
        return max(_rel_change(n, o) for n, o in zip(new, old))
    den = frob_norm(new)
    diff = frob_norm(new - old)
    return diff / den if den != 0 else diff


def _copy(X):
    return tuple(x.copy() for x in X) if isinstance(X, tuple) else X.copy()


def run_iteration(update, state, value, residual, opts, *, derivative=None,
                  group=None, residual_tol=None, label='iteration'):
    """
    Drive ``state -> update(state)`` until convergence.

    Parameters
    ----------
    update : callable
        Maps the state tuple to the next state tuple.
    state : tuple of ndarray
    value : callable
        Extracts the value stream (whose step change is monitored).
    residual : callable
        Kind-specific residual of a state.
    opts : IterOptions
    derivative : callable, optional
        Extracts a derivative stream (an array or a tuple of arrays) whose
        relative step change must also drop below ``tol``.
    group : GroupForm, optional
        Record ``||X^T M X - M||_F`` of the value stream per step.
    residual_tol : float, optional
        Residual acceptance level, default ``10 * tol``.

    Returns
    -------
    state : tuple
    trace : IterationTrace

    Notes
    -----
    Convergence is declared when the relative step change of every stream
    is below ``tol`` and the residual below ``residual_tol``.  A stream
    whose step change stalls (fails to halve) after dropping below
    ``sqrt(tol)`` is treated as having reached the rounding floor.
    """
    tol = opts.tol
    X = value(state)
    eps = machine_eps(X)
    if tol < eps:
        raise ValueError(f'tol={tol} is below the unit roundoff {eps}')
    res_tol = 10 * tol if residual_tol is None else residual_tol
    floor_gate = math.sqrt(tol)
    M = None if group is None else group.M

    steps, dsteps, residuals, groups = [math.nan], [math.nan], [], []
    iterates = [X.copy()] if opts.record_trace else None
    D = derivative(state) if derivative is not None else None
    diterates = [_copy(D)] if (opts.record_trace and D is not None) else None
    res = residual(state)
    residuals.append(res)
    if M is not None:
        groups.append(_group_residual(X, M))
    min_res = res
    stalled = 0

    def freeze(converged):
        return IterationTrace(
            steps=tuple(steps), residuals=tuple(residuals),
            group_residuals=tuple(groups) if M is not None else None,
            iterates=tuple(iterates) if iterates is not None else None,
            derivative_steps=tuple(dsteps) if D is not None else None,
            derivative_iterates=(tuple(diterates) if diterates is not None
                                 else None),
            converged=converged)

    def stream_ok(hist):
        s = hist[-1]
        if s <= tol:
            return True
        prev = hist[-2]
        return len(hist) > 2 and prev <= floor_gate and s >= 0.5 * prev

    for k in range(1, opts.max_iter + 1):
        try:
            new = update(state)
        except SingularMatrix as exc:
            raise SingularMatrix(f'{label}: solve singular at step {k} '
                                 f'({exc})', step=k) from exc
        Xn = value(new)
        steps.append(_rel_change(Xn, X))
        if D is not None:
            Dn = derivative(new)
            dsteps.append(_rel_change(Dn, D))
            D = Dn
            if diterates is not None:
                diterates.append(_copy(Dn))
        res = residual(new)
        residuals.append(res)
        if M is not None:
            groups.append(_group_residual(Xn, M))
        if iterates is not None:
            iterates.append(Xn.copy())
        state, X = new, Xn

        if res > DIVERGENCE_FACTOR * max(min_res, math.sqrt(eps)):
            raise NotConverged(f'{label} diverged at step {k}: residual '
                               f'{float(res):.3e} vs minimum '
                               f'{float(min_res):.3e}', trace=freeze(False),
                               reason='diverged')
        min_res = min(min_res, res)

        steps_ok = stream_ok(steps) and (D is None or stream_ok(dsteps))
        if steps_ok and res <= res_tol:
            return state, freeze(True)
        stalled = stalled + 1 if steps_ok else 0
        if stalled >= 3:
            raise NotConverged(f'{label}: iterates stalled with residual '
                               f'{float(res):.3e} > {float(res_tol):.3e}',
                               trace=freeze(False), reason='stalled')
    raise NotConverged(f'{label} did not converge in {opts.max_iter} '
                       f'iterations (last residual {float(res):.3e})',
                       trace=freeze(False), reason='max_iter')


def _opts(opts):
    return IterOptions() if opts is None else opts


# -- evaluators --------------------------------------------------------------

def newton_sign(A, opts=None, *, group=None):
    """
    Matrix sign by the quadratic Newton iteration ``X <- (X + X^{-1})/2``.

    Parameters
    ----------
    A : (n, n) array_like
        Must have no purely imaginary eigenvalues; violations surface as a
        singular solve or non-convergence.
    opts : IterOptions, optional
    group : GroupForm, optional
        Record the automorphism residual of every iterate.

    Returns
    -------
    S : ndarray
    trace : IterationTrace
    """
    A = as_matrix(A, square=True)
    (S,), trace = run_iteration(
        lambda s: (sign_newton_step(s[0]),), (A,), lambda s: s[0],
        lambda s: sign_residual(s[0]), _opts(opts), group=group,
        label='newton_sign')
    return S, trace


def newton_sqrt(A, opts=None, *, group=None):
    """
    Principal square root by ``X <- (X + X^{-1} A)/2`` from ``X_0 = A``.

    This form is numerically unstable for ill-conditioned ``A``; prefer
    :func:`db_sqrt` or :func:`pade_sqrt`.
    """
    A = as_matrix(A, square=True)
    (X,), trace = run_iteration(
        lambda s: (sqrt_newton_step(s[0], A),), (A,), lambda s: s[0],
        lambda s: sqrt_residual(s[0], A), _opts(opts), group=group,
        label='newton_sqrt')
    return X, trace


def db_sqrt(A, opts=None, *, group=None):
    """
    Denman-Beavers iteration.

    Returns
    -------
    Y : ndarray
        Approximation to ``A^{1/2}``.
    Z : ndarray
        Approximation to ``A^{-1/2}``.
    trace : IterationTrace
        Tracks the ``Y`` stream.
    """
    A = as_matrix(A, square=True)
    (Y, Z), trace = run_iteration(
        lambda s: db_step(*s), (A, eye_like(A)), lambda s: s[0],
        lambda s: sqrt_pair_residual(s[0], s[1], A), _opts(opts),
        group=group, label='db_sqrt')
    return Y, Z, trace


def newton_polar(A, flavor='transpose', opts=None, *, group=None):
    """
    Orthogonal (unitary) polar factor by Newton's method.

    Square ``A`` uses ``X <- (X + X^{-T})/2``; rectangular ``A`` (``m > n``)
    uses ``X <- X (I + (X^T X)^{-1})/2``.  With ``flavor='conjugate'`` every
    transpose becomes a conjugate transpose.
    """
    A = as_matrix(A)
    if A.shape[0] < A.shape[1]:
        raise ValueError(f'polar factor needs rows >= cols, got {A.shape}')
    adjoint(A, flavor)
    (Q,), trace = run_iteration(
        lambda s: (polar_newton_step(s[0], flavor),), (A,), lambda s: s[0],
        lambda s: polar_residual(s[0], flavor), _opts(opts), group=group,
        label='newton_polar')
    return Q, trace


def pade_sign(A, ell, opts=None, *, group=None):
    """
    Padé sign iteration ``X <- X r_ll(I - X^2)`` of order ``2 ell + 1``.

    Iterates stay in the automorphism group of ``A`` when ``A`` is one.
    """
    A = as_matrix(A, square=True)
    ell = check_order(ell)
    (S,), trace = run_iteration(
        lambda s: (sign_pade_step(s[0], ell),), (A,), lambda s: s[0],
        lambda s: sign_residual(s[0]), _opts(opts), group=group,
        label=f'pade_sign(l={ell})')
    return S, trace


def pade_sqrt(A, ell, opts=None, *, group=None):
    """
    Padé square root iteration, ``Y -> A^{1/2}`` and ``Z -> A^{-1/2}``.

    ``Y <- Y r(I - Z Y)`` and ``Z <- r(I - Z Y) Z``.
    """
    A = as_matrix(A, square=True)
    ell = check_order(ell)
    (Y, Z), trace = run_iteration(
        lambda s: sqrt_pade_step(s[0], s[1], ell), (A, eye_like(A)),
        lambda s: s[0], lambda s: sqrt_pair_residual(s[0], s[1], A),
        _opts(opts), group=group, label=f'pade_sqrt(l={ell})')
    return Y, Z, trace


def pade_polar(A, ell, flavor='transpose', opts=None, *, group=None):
    """Padé polar iteration ``X <- X r_ll(I - X^T X)``; any ``m >= n``."""
    A = as_matrix(A)
    if A.shape[0] < A.shape[1]:
        raise ValueError(f'polar factor needs rows >= cols, got {A.shape}')
    ell = check_order(ell)
    adjoint(A, flavor)
    (Q,), trace = run_iteration(
        lambda s: (polar_pade_step(s[0], ell, flavor),), (A,),
        lambda s: s[0], lambda s: polar_residual(s[0], flavor), _opts(opts),
        group=group, label=f'pade_polar(l={ell})')
    return Q, trace


# -- order of convergence ----------------------------------------------------

def order_from_errors(errors, eps, upper=1e-2):
    """
    Least-squares slope of ``log e_{k+1}`` against ``log e_k``.

    Only errors inside ``(100 eps, upper)`` take part, and at least four
    of them are required.
    """
    lo = 100 * eps
    ok = [lo < e < upper for e in errors]
    if sum(ok) < 4:
        raise InsufficientData(
            f'{sum(ok)} errors inside ({float(lo):.1e}, {upper:.0e}); '
            f'need at least 4')
    logs = [float(mpmath.log(e)) if ok_k else None
            for e, ok_k in zip(errors, ok)]
    pairs = [(logs[k], logs[k + 1]) for k in range(len(logs) - 1)
             if ok[k] and ok[k + 1]]
    if len(pairs) < 2:
        raise InsufficientData('fewer than two consecutive error pairs')
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def estimate_order(trace, ref):
    """
    Observed order of convergence of a recorded trace towards ``ref``.

    In double precision even a quadratic iteration rarely leaves four
    iterates inside the error window; run the iteration on ``object``
    arrays (see :func:`matfun.linalg.to_mp`) with ``mpmath.mp.dps`` raised
    to measure orders of three and five.

    Raises
    ------
    InsufficientData
    """
    if trace.iterates is None:
        raise InsufficientData('trace has no iterates; run with '
                               'record_trace=True')
    ref_norm = frob_norm(ref)
    errors = [frob_norm(X - ref) / ref_norm for X in trace.iterates]
    return order_from_errors(errors, machine_eps(ref))
