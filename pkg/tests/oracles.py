"""
Independent reference computations for the test-suite.

Everything here goes through eigendecompositions or scipy's Schur-based
matrix functions, i.e. through routes the package itself never uses.
"""
import numpy as np
import scipy.linalg


def eig_function(A, f):
    """``V f(Lambda) V^{-1}`` for diagonalizable ``A``."""
    w, V = np.linalg.eig(A)
    return (V * f(w)) @ np.linalg.inv(V)


def sign_oracle(A):
    S = eig_function(A, lambda w: np.sign(w.real))
    return S.real if np.isrealobj(A) else S


def sqrt_oracle(A):
    X = scipy.linalg.sqrtm(A)
    return X.real if np.isrealobj(A) else X


def polar_oracle(A):
    return scipy.linalg.polar(A)[0]


def daleckii_krein(A, f, df, E):
    """
    Fréchet derivative by divided differences in the eigenbasis of ``A``.

    ``L = V (Phi o (V^{-1} E V)) V^{-1}`` with ``Phi_ij = f[l_i, l_j]``.
    """
    w, V = np.linalg.eig(A)
    Vi = np.linalg.inv(V)
    fw, dfw = f(w), df(w)
    diff = w[:, None] - w[None, :]
    close = np.abs(diff) < 1e-10 * max(1.0, np.abs(w).max())
    with np.errstate(divide='ignore', invalid='ignore'):
        Phi = np.where(close, 0.5 * (dfw[:, None] + dfw[None, :]),
                       (fw[:, None] - fw[None, :]) / diff)
    L = V @ (Phi * (Vi @ E @ V)) @ Vi
    return L.real if np.isrealobj(A) and np.isrealobj(E) else L


def sign_frechet_oracle(A, E):
    return daleckii_krein(A, lambda w: np.sign(w.real),
                          lambda w: np.zeros_like(w), E)


def sqrt_frechet_oracle(A, E):
    return daleckii_krein(A, lambda w: np.sqrt(w.astype(complex)),
                          lambda w: 0.5 / np.sqrt(w.astype(complex)), E)


def central_difference(F, A, E, t):
    return (F(A + t * E) - F(A - t * E)) / (2 * t)


def rel(X, Y):
    """``||X - Y||_F / ||Y||_F`` (absolute when ``Y = 0``)."""
    d = np.linalg.norm(np.asarray(X) - np.asarray(Y))
    n = np.linalg.norm(Y)
    return d / n if n else d
