"""
Fréchet derivatives by coupled iterations and by the complex step.

A coupled iteration differentiates every update of a value iteration and
carries the pair ``(X_k, E_k)``.  The complex-step (CS) route runs the
unmodified value iteration on ``A + i h E`` and reads ``F(A)`` off the real
part and ``L_F(A, E)`` off the imaginary part divided by ``h``.  Running the
coupled iteration itself in complex arithmetic from ``A + i h D`` yields the
second derivative ``L^[2](A; D, E)``.

Kinds
-----
``sign``
    Matrix sign.
``sqrt``
    Principal square root.  With the Newton scheme this is the plain
    ``X <- (X + X^{-1} A)/2`` recursion, with a Padé scheme the coupled
    ``(Y, Z)`` iteration.
``db``
    Denman-Beavers ``(Y, Z)`` pair; with a Padé scheme same as ``sqrt``.
``polar_t``
    Orthogonal polar factor of a real ``m x n`` matrix (transpose flavour).
"""
from dataclasses import dataclass

import numpy as np

from .errors import NotConverged, ShapeMismatch, StepTooLarge
from .iterations import IterOptions, IterationTrace, PADE_DENOMINATOR, \
    PADE_NUMERATOR, check_order, db_step, poly_eval, poly_frechet, \
    polar_newton_step, polar_pade_step, polar_residual, run_iteration, \
    sign_newton_step, sign_pade_step, sign_residual, sqrt_newton_step, \
    sqrt_pade_step, sqrt_pair_residual, sqrt_residual
from .linalg import as_matrix, eye_like, frob_norm, inverse, solve_linear

__all__ = ['KINDS', 'CsResult', 'CoupledResult', 'SecondFrechetResult',
           'parse_scheme', 'coupled_newton', 'coupled_pade', 'cs_derivative',
           'cs_vs_coupled_gap', 'second_frechet_cs', 'cs_iterates',
           'coupled_iterates', 'gap_statistic', 'DEFAULT_H']

KINDS = ('sign', 'sqrt', 'db', 'polar_t')
DEFAULT_H = float(np.finfo(float).eps)


@dataclass(frozen=True)
class CsResult:
    """
    Value and derivative extracted from one complex-step run.

    ``value = Re(X_hat)`` and ``derivative = Im(X_hat) / h`` for the final
    iterate.  Square-root pair schemes also fill the inverse square root
    streams.
    """
    value: np.ndarray
    derivative: np.ndarray
    h: float
    trace: IterationTrace
    inv_value: np.ndarray = None
    inv_derivative: np.ndarray = None


@dataclass(frozen=True)
class CoupledResult:
    """Value and derivative from a coupled iteration."""
    value: np.ndarray
    derivative: np.ndarray
    trace: IterationTrace
    inv_value: np.ndarray = None
    inv_derivative: np.ndarray = None


@dataclass(frozen=True)
class SecondFrechetResult:
    """
    Streams of the complex coupled run started at ``(A + i h D, E)``.

    Attributes
    ----------
    value : F(A)
    first_e : L_F(A, E)
    first_d : L_F(A, D)
    second : L^[2]_F(A; D, E)
    """
    value: np.ndarray
    first_e: np.ndarray
    first_d: np.ndarray
    second: np.ndarray
    h: float
    trace: IterationTrace


def parse_scheme(scheme):
    """Map ``'newton' | 'pade1' | 'pade2'`` (or 0, 1, 2) to ``ell``."""
    if scheme in ('newton', 0):
        return 0
    if isinstance(scheme, str) and scheme.startswith('pade'):
        try:
            return check_order(int(scheme[4:]))
        except ValueError:
            pass
    elif isinstance(scheme, int):
        return check_order(scheme)
    raise ValueError(f"scheme must be 'newton', 'pade1' or 'pade2', "
                     f"got {scheme!r}")


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f'kind must be one of {KINDS}, got {kind!r}')


def _is_pair(kind, ell):
    return kind == 'db' or (kind == 'sqrt' and ell > 0)


def _check_inputs(kind, A, E, name='E'):
    A = as_matrix(A, square=(kind != 'polar_t'))
    E = as_matrix(E, name)
    if E.shape != A.shape:
        raise ShapeMismatch(f'{name} is {E.shape} but A is {A.shape}')
    if kind == 'polar_t' and A.shape[0] < A.shape[1]:
        raise ShapeMismatch(f'polar factor needs rows >= cols, got {A.shape}')
    return A, E


def _require_real(*mats):
    for M in mats:
        if np.iscomplexobj(M):
            raise ValueError('complex-step and coupled derivatives need real '
                             'A and directions')


def _opts(opts):
    return IterOptions() if opts is None else opts


# -- plain value updates, applied to complex iterates by the CS route ------

def _value_update(kind, ell, X0):
    if kind == 'sign':
        if ell:
            return lambda s: (sign_pade_step(s[0], ell),)
        return lambda s: (sign_newton_step(s[0]),)
    if _is_pair(kind, ell):
        if ell:
            return lambda s: sqrt_pade_step(s[0], s[1], ell)
        return lambda s: db_step(s[0], s[1])
    if kind == 'sqrt':
        return lambda s: (sqrt_newton_step(s[0], X0),)
    if ell:
        return lambda s: (polar_pade_step(s[0], ell),)
    return lambda s: (polar_newton_step(s[0]),)


def _value_residual(kind, ell, A):
    """Residual of the real value stream against the real input ``A``."""
    if kind == 'sign':
        return lambda Y, Z: sign_residual(Y)
    if _is_pair(kind, ell):
        return lambda Y, Z: sqrt_pair_residual(Y, Z, A)
    if kind == 'sqrt':
        return lambda Y, Z: sqrt_residual(Y, A)
    return lambda Y, Z: polar_residual(Y)


# -- coupled updates -----------------------------------------------------------

def _pade_pair(W, dW, ell):
    """``r = q^{-1} p`` and its derivative ``q^{-1}(dp - dq r)``."""
    p_c, q_c = PADE_NUMERATOR[ell], PADE_DENOMINATOR[ell]
    q = poly_eval(q_c, W)
    r = solve_linear(q, poly_eval(p_c, W))
    dp = poly_frechet(p_c, W, dW)
    dq = poly_frechet(q_c, W, dW)
    return r, solve_linear(q, dp - dq @ r)


def _sign_newton_coupled(s):
    X, D = s
    Xi = inverse(X)
    return 0.5 * (X + Xi), 0.5 * (D - Xi @ D @ Xi)


def _sign_pade_coupled(s, ell):
    X, D = s
    r, dr = _pade_pair(X @ X, X @ D + D @ X, ell)
    return X @ r, D @ r + X @ dr


def _sqrt_newton_coupled(s, X0, E0):
    # X0 is the starting matrix, differentiated in direction E0
    X, D = s
    XiA = solve_linear(X, X0)
    return (0.5 * (X + XiA),
            0.5 * (D + solve_linear(X, E0 - D @ XiA)))


def _db_coupled(s):
    Y, Z, dY, dZ = s
    Yi, Zi = inverse(Y), inverse(Z)
    return (0.5 * (Y + Zi), 0.5 * (Z + Yi),
            0.5 * (dY - Zi @ dZ @ Zi), 0.5 * (dZ - Yi @ dY @ Yi))


def _sqrt_pade_coupled(s, ell):
    Y, Z, dY, dZ = s
    r, dr = _pade_pair(Z @ Y, dZ @ Y + Z @ dY, ell)
    return Y @ r, r @ Z, dY @ r + Y @ dr, dr @ Z + r @ dZ


def _polar_newton_coupled(s):
    X, D = s
    if X.shape[0] == X.shape[1]:
        Xi = inverse(X)
        return 0.5 * (X + Xi.T), 0.5 * (D - (Xi @ D @ Xi).T)
    G = X.T @ X
    dG = X.T @ D + D.T @ X
    Gi = inverse(G)
    return (0.5 * (X + X @ Gi),
            0.5 * (D + D @ Gi - X @ Gi @ dG @ Gi))


def _polar_pade_coupled(s, ell):
    X, D = s
    r, dr = _pade_pair(X.T @ X, X.T @ D + D.T @ X, ell)
    return X @ r, D @ r + X @ dr


def _coupled_update(kind, ell, X0, E0):
    if kind == 'sign':
        if ell:
            return lambda s: _sign_pade_coupled(s, ell)
        return _sign_newton_coupled
    if _is_pair(kind, ell):
        if ell:
            return lambda s: _sqrt_pade_coupled(s, ell)
        return _db_coupled
    if kind == 'sqrt':
        return lambda s: _sqrt_newton_coupled(s, X0, E0)
    if ell:
        return lambda s: _polar_pade_coupled(s, ell)
    return _polar_newton_coupled


def _coupled_start(kind, ell, X0, E0):
    if _is_pair(kind, ell):
        I = eye_like(X0)
        return (X0, I, E0, np.zeros_like(I))
    return (X0, E0)


def _run_coupled(kind, ell, A, E, opts, group=None):
    pair = _is_pair(kind, ell)
    res = _value_residual(kind, ell, A)
    start = _coupled_start(kind, ell, A, E)
    half = len(start) // 2
    state, trace = run_iteration(
        _coupled_update(kind, ell, A, E), start,
        lambda s: s[0], lambda s: res(s[0], s[1] if pair else None),
        _opts(opts), derivative=lambda s: s[half], group=group,
        label=f'coupled {kind}/{_scheme_name(ell)}')
    if pair:
        Y, Z, dY, dZ = state
        return CoupledResult(Y, dY, trace, Z, dZ)
    return CoupledResult(state[0], state[1], trace)


def _scheme_name(ell):
    return f'pade{ell}' if ell else 'newton'


def coupled_newton(kind, A, E, opts=None, *, group=None):
    """
    Value and Fréchet derivative by the differentiated Newton iteration.

    For ``sign`` the derivative stream is
    ``E_{k+1} = (E_k - X_k^{-1} E_k X_k^{-1}) / 2``.  For ``sqrt`` the
    start ``A`` is itself differentiated in direction ``E``.  ``db`` also
    returns the inverse square root and its derivative.

    Parameters
    ----------
    kind : {'sign', 'sqrt', 'db', 'polar_t'}
    A, E : real array_like of equal shape
    opts : IterOptions, optional
    group : GroupForm, optional

    Returns
    -------
    CoupledResult
    """
    _check_kind(kind)
    A, E = _check_inputs(kind, A, E)
    _require_real(A, E)
    return _run_coupled(kind, 0, A, E, opts, group)


def coupled_pade(kind, A, E, ell, opts=None, *, group=None):
    """
    Value and Fréchet derivative by the differentiated Padé iteration.

    The rational factor ``r = q(W)^{-1} p(W)`` is differentiated with the
    product rule on the polynomial pieces followed by one solve against
    ``q(W)``.  ``kind='sqrt'`` returns the inverse square root streams too.
    """
    _check_kind(kind)
    ell = check_order(ell)
    A, E = _check_inputs(kind, A, E)
    _require_real(A, E)
    return _run_coupled(kind, ell, A, E, opts, group)


# -- complex step --------------------------------------------------------------

def _cs_start(kind, ell, A, E, h):
    X0 = A + 1j * h * E
    if _is_pair(kind, ell):
        return (X0, eye_like(X0))
    return (X0,)


def cs_derivative(kind, scheme, A, E, h=DEFAULT_H, opts=None, *, group=None):
    """
    Complex-step value and Fréchet derivative.

    Runs the value iteration in complex arithmetic from ``A + i h E``
    (``Y_0 = A + i h E``, ``Z_0 = I`` for the square-root pairs).  Both the
    real part and ``Im / h`` are monitored by the stopping rule.

    Parameters
    ----------
    kind : {'sign', 'sqrt', 'db', 'polar_t'}
    scheme : {'newton', 'pade1', 'pade2'}
    A, E : real array_like
    h : float
        Step, default machine epsilon.
    opts : IterOptions, optional
    group : GroupForm, optional
        Record the group residual of ``Re(X_hat_k)``.

    Returns
    -------
    CsResult

    Raises
    ------
    StepTooLarge
        The real part stalls above the residual tolerance, i.e. ``h`` has
        polluted the value stream.
    """
    _check_kind(kind)
    ell = parse_scheme(scheme)
    A, E = _check_inputs(kind, A, E)
    _require_real(A, E)
    if not h > 0:
        raise ValueError(f'h must be positive, got {h}')
    pair = _is_pair(kind, ell)
    res = _value_residual(kind, ell, A)
    try:
        state, trace = run_iteration(
            _value_update(kind, ell, A + 1j * h * E),
            _cs_start(kind, ell, A, E, h), lambda s: s[0].real,
            lambda s: res(s[0].real, s[1].real if pair else None),
            _opts(opts), derivative=lambda s: s[0].imag / h, group=group,
            label=f'complex-step {kind}/{_scheme_name(ell)}')
    except NotConverged as exc:
        if exc.reason == 'stalled':
            raise StepTooLarge(f'h={h:.3e} too large: {exc}') from exc
        raise
    X = state[0]
    if pair:
        Z = state[1]
        return CsResult(X.real, X.imag / h, h, trace, Z.real, Z.imag / h)
    return CsResult(X.real, X.imag / h, h, trace)


def cs_iterates(kind, scheme, A, E, h=DEFAULT_H):
    """
    Yield the complex iterates ``X_hat_k``, ``k = 0, 1, ...``, of the
    complex-step run without any stopping logic.

    For square-root pair schemes only the ``Y`` stream is yielded.
    """
    _check_kind(kind)
    ell = parse_scheme(scheme)
    A, E = _check_inputs(kind, A, E)
    _require_real(A, E)
    update = _value_update(kind, ell, A + 1j * h * E)
    state = _cs_start(kind, ell, A, E, h)
    while True:
        yield state[0]
        state = update(state)


def coupled_iterates(kind, scheme, A, E):
    """Yield the coupled pairs ``(X_k, E_k)`` without stopping logic."""
    _check_kind(kind)
    ell = parse_scheme(scheme)
    A, E = _check_inputs(kind, A, E)
    _require_real(A, E)
    update = _coupled_update(kind, ell, A, E)
    state = _coupled_start(kind, ell, A, E)
    half = len(state) // 2
    while True:
        yield state[0], state[half]
        state = update(state)


def gap_statistic(X, D, X_hat, h, scale):
    """``(||X - Re X_hat||_F + ||D - Im X_hat / h||_F) / scale``."""
    return (frob_norm(X - X_hat.real)
            + frob_norm(D - X_hat.imag / h)) / scale


def cs_vs_coupled_gap(kind, scheme, A, E, h=DEFAULT_H, opts=None):
    """
    Per-step distance between the complex-step and coupled iterates.

    ``T_k = (||X_k - Re X_hat_k||_F + ||E_k - Im X_hat_k / h||_F)
    / (||F(A)||_F + ||L_F(A, E)||_F)`` for ``k = 0 .. K`` where ``K`` is
    the number of steps the coupled run needs; the complex run takes the
    same number of steps.  ``F`` and ``L`` are the converged coupled
    values.

    Returns
    -------
    ndarray of shape (K + 1,)
    """
    _check_kind(kind)
    ell = parse_scheme(scheme)
    A, E = _check_inputs(kind, A, E)
    _require_real(A, E)
    cpl = _run_coupled(kind, ell, A, E, _opts(opts))
    scale = frob_norm(cpl.value) + frob_norm(cpl.derivative)
    if scale == 0:
        scale = 1.0
    pairs = coupled_iterates(kind, scheme, A, E)
    hats = cs_iterates(kind, scheme, A, E, h)
    return np.array([gap_statistic(*next(pairs), next(hats), h, scale)
                     for _ in range(cpl.trace.iterations + 1)])


def second_frechet_cs(kind, scheme, A, E, D, h=DEFAULT_H, opts=None):
    """
    Second Fréchet derivative through the coupled iteration run on
    ``(A + i h D, E)``.

    The limits are ``Re X -> F(A)``, ``Im X / h -> L(A, D)``,
    ``Re E -> L(A, E)`` and ``Im E / h -> L^[2](A; D, E)``.

    Returns
    -------
    SecondFrechetResult
    """
    _check_kind(kind)
    ell = parse_scheme(scheme)
    A, E = _check_inputs(kind, A, E)
    A, D = _check_inputs(kind, A, D, 'D')
    _require_real(A, E, D)
    if not h > 0:
        raise ValueError(f'h must be positive, got {h}')
    pair = _is_pair(kind, ell)
    X0 = A + 1j * h * D
    E0 = E.astype(complex)
    start = _coupled_start(kind, ell, X0, E0)
    half = len(start) // 2
    res = _value_residual(kind, ell, A)

    def streams(s):
        return (s[half].real, s[0].imag / h, s[half].imag / h)

    state, trace = run_iteration(
        _coupled_update(kind, ell, X0, E0), start, lambda s: s[0].real,
        lambda s: res(s[0].real, s[1].real if pair else None), _opts(opts),
        derivative=streams,
        label=f'second-order complex-step {kind}/{_scheme_name(ell)}')
    X, dX = state[0], state[half]
    return SecondFrechetResult(X.real, dX.real, X.imag / h, dX.imag / h, h,
                               trace)
