"""
Dense real/complex matrix kernels.

Matrices are plain 2-D :class:`numpy.ndarray` objects.  ``float64`` and
``complex128`` arrays are dispatched to LAPACK's partially pivoted LU;
``object`` arrays holding :mod:`mpmath` scalars go through the pure-numpy
LU below, which lets every iteration in the package run in extended
precision without a second code path.
"""
import math
import warnings

import mpmath
import numpy as np
import scipy.linalg

from .errors import RankDeficient, ShapeMismatch, SingularMatrix

__all__ = ['as_matrix', 'machine_eps', 'eye_like', 'frob_norm',
           'lu_decompose', 'lu_solve', 'solve_linear', 'solve_right',
           'inverse', 'adjoint', 'pseudoinverse_apply', 'cond_estimate',
           'to_mp', 'format_matrix', 'parse_matrix', 'read_matrix',
           'write_matrix']


def as_matrix(A, name='A', square=False):
    """Validate ``A`` as a finite 2-D matrix and return it as an ndarray."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeMismatch(f'{name} must be a non-empty 2-D matrix, '
                            f'got shape {A.shape}')
    if square and A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f'{name} must be square, got shape {A.shape}')
    if A.dtype.kind in 'iub':
        A = A.astype(np.float64)
    if A.dtype != object and not np.all(np.isfinite(A)):
        raise ValueError(f'{name} contains NaN or Inf entries')
    return A


def machine_eps(A):
    """Unit roundoff of the arithmetic ``A`` is stored in."""
    dtype = A.dtype if hasattr(A, 'dtype') else np.dtype(A)
    if dtype == object:
        return mpmath.mp.eps
    return np.finfo(dtype).eps


def eye_like(A, n=None):
    n = A.shape[0] if n is None else n
    return np.eye(n, dtype=A.dtype)


def to_mp(A):
    """Copy a numeric array into an object array of mpmath scalars."""
    A = np.asarray(A)
    conv = mpmath.mpc if np.iscomplexobj(A) else mpmath.mpf
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        out[idx] = conv(x)
    return out


def frob_norm(X):
    """Frobenius norm ``sqrt(sum |x_ij|^2)``."""
    X = np.asarray(X)
    if X.dtype == object:
        return mpmath.sqrt(mpmath.fsum(abs(x) ** 2 for x in X.flat))
    return float(np.linalg.norm(X))


def _threshold(A):
    return A.shape[0] * machine_eps(A) * frob_norm(A)


def lu_decompose(A):
    """
    LU factorization with partial pivoting, ``A[perm] = L @ U``.

    Works for any numeric dtype including ``object`` arrays of mpmath
    numbers.

    Parameters
    ----------
    A : (n, n) ndarray

    Returns
    -------
    LU : (n, n) ndarray
        Unit lower factor below the diagonal, upper factor on and above.
    perm : (n,) ndarray of int
        Row permutation.

    Raises
    ------
    SingularMatrix
        If a pivot magnitude falls below ``n * eps * ||A||_F``.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    LU = A.copy() if A.dtype == object else A.astype(np.result_type(A, 1.0))
    perm = np.arange(n)
    thresh = _threshold(A)
    for k in range(n):
        col = LU[k:, k]
        mags = [abs(x) for x in col] if LU.dtype == object else np.abs(col)
        p = k + int(np.argmax(mags))
        if not mags[p - k] > thresh:
            raise SingularMatrix(
                f'pivot {float(mags[p - k]):.3e} below threshold '
                f'{float(thresh):.3e} at column {k}')
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] = LU[k + 1:, k] / LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def lu_solve(LU, perm, B):
    """Solve ``A X = B`` from the factors returned by :func:`lu_decompose`."""
    n = LU.shape[0]
    B = np.asarray(B)
    X = np.array(B[perm].reshape(n, -1), dtype=np.result_type(LU, B))
    for k in range(n):
        X[k + 1:] -= np.outer(LU[k + 1:, k], X[k])
    for k in range(n - 1, -1, -1):
        X[k] = X[k] / LU[k, k]
        X[:k] -= np.outer(LU[:k, k], X[k])
    return X.reshape(B.shape)


def _lapack_factor(A):
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    thresh = _threshold(A)
    if not pivots.min() > thresh:
        k = int(np.argmin(pivots))
        raise SingularMatrix(f'pivot {pivots[k]:.3e} below threshold '
                             f'{thresh:.3e} at column {k}')
    return lu, piv


def solve_linear(A, B):
    """
    Solve ``A X = B`` by LU with partial pivoting.

    Parameters
    ----------
    A : (n, n) array_like
    B : (n, k) or (n,) array_like

    Returns
    -------
    X : ndarray

    Raises
    ------
    SingularMatrix
        A pivot fell below ``n * eps * ||A||_F``.
    """
    A = as_matrix(A, square=True)
    B = np.asarray(B)
    if B.shape[0] != A.shape[0]:
        raise ShapeMismatch(f'row mismatch: A is {A.shape}, B is {B.shape}')
    if A.dtype == object or B.dtype == object:
        A = A.astype(object) if A.dtype != object else A
        LU, perm = lu_decompose(A)
        return lu_solve(LU, perm, B)
    lu, piv = _lapack_factor(A)
    return scipy.linalg.lu_solve((lu, piv), B, check_finite=False)


def solve_right(B, A):
    """Return ``B @ inv(A)`` (solves ``X A = B``) with plain transposes."""
    return solve_linear(np.asarray(A).T, np.asarray(B).T).T


def inverse(A):
    A = as_matrix(A, square=True)
    return solve_linear(A, eye_like(A))


def pseudoinverse_apply(X, flavor='transpose'):
    """
    Moore-Penrose inverse of a full-column-rank matrix via its Gram matrix.

    Returns ``(X^T X)^{-1} X^T`` for ``flavor='transpose'`` and
    ``(X^H X)^{-1} X^H`` for ``flavor='conjugate'``.

    Raises
    ------
    RankDeficient
        When the Gram matrix is numerically singular.
    """
    X = as_matrix(X, 'X')
    if X.shape[0] < X.shape[1]:
        raise ShapeMismatch(f'need rows >= cols, got {X.shape}')
    Xt = adjoint(X, flavor)
    try:
        return solve_linear(Xt @ X, Xt)
    except SingularMatrix as exc:
        raise RankDeficient(f'Gram matrix singular: {exc}') from exc


def adjoint(X, flavor='transpose'):
    if flavor == 'transpose':
        return X.T
    if flavor == 'conjugate':
        return X.conj().T
    raise ValueError(f"flavor must be 'transpose' or 'conjugate', "
                     f"got {flavor!r}")


def cond_estimate(A):
    """
    Frobenius condition number ``||A||_F ||A^{-1}||_F``.

    This over-estimates the 2-norm condition number by at most a factor
    ``n`` and is never below ``n``.
    """
    A = as_matrix(A, square=True)
    return frob_norm(A) * frob_norm(inverse(A))


# -- text format ------------------------------------------------------------

def _fmt_scalar(x, as_complex):
    if as_complex:
        x = complex(x)
        return f'{x.real:.17g}{x.imag:+.17g}i'
    return f'{float(x):.17g}'


def format_matrix(A):
    """Render ``A`` in the ``rows cols`` + whitespace table text format."""
    A = as_matrix(A)
    cplx = np.iscomplexobj(A)
    lines = [f'{A.shape[0]} {A.shape[1]}']
    for row in A:
        lines.append(' '.join(_fmt_scalar(x, cplx) for x in row))
    return '\n'.join(lines) + '\n'


def _parse_scalar(tok):
    if tok.endswith('i'):
        val = complex(tok[:-1] + 'j')
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            raise ValueError(f'non-finite entry {tok!r}')
        return val
    val = float(tok)
    if not math.isfinite(val):
        raise ValueError(f'non-finite entry {tok!r}')
    return val


def parse_matrix(text):
    """Inverse of :func:`format_matrix`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError('empty matrix text')
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f'bad header line {lines[0]!r}')
    rows, cols = int(header[0]), int(header[1])
    if rows < 1 or cols < 1:
        raise ValueError(f'bad dimensions {rows}x{cols}')
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f'expected {rows} rows, found {len(body)}')
    entries = []
    for i, ln in enumerate(body):
        toks = ln.split()
        if len(toks) != cols:
            raise ValueError(f'row {i}: expected {cols} entries, '
                             f'found {len(toks)}')
        entries.append([_parse_scalar(t) for t in toks])
    cplx = any(isinstance(x, complex) for row in entries for x in row)
    return np.array(entries, dtype=complex if cplx else float)


def read_matrix(path):
    with open(path, encoding='utf-8') as fh:
        return parse_matrix(fh.read())


def write_matrix(path, A):
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(format_matrix(A))
