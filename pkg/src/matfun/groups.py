"""
Automorphism groups ``{G : G^T M G = M}`` and random test elements.

Supported forms are the symplectic ``J = [[0, I], [-I, 0]]``, the
pseudo-orthogonal ``diag(I_p, -I_q)``, the perplectic anti-identity ``R``
and the identity (orthogonal group).

Random elements are built as ``G = T G0 T^{-1}``.  ``G0`` is a canonical
group element with a prescribed spectrum (rotation-scaling blocks for
``J``, boost-rotation blocks for ``Sigma``), and ``T = cayley(beta S)`` is
the Cayley transform of a random Lie-algebra element.  Both factors lie in
the group, so ``T^{-1} = M^T T^T M`` is formed without a solve.  The
spread ``gamma`` of ``G0``'s eigenvalue moduli and the conjugator scale
``beta`` steer the Frobenius condition number, which for a group element
equals ``||G||_F^2``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed, MatfunError, ShapeMismatch, \
    SingularMatrix
from .linalg import as_matrix, cond_estimate, frob_norm, solve_right

__all__ = ['GROUP_KINDS', 'GroupForm', 'GenSpec', 'group_form',
           'group_residual', 'cayley', 'lie_element', 'random_automorphism',
           'random_direction']

GROUP_KINDS = ('symplectic', 'pseudo_orthogonal', 'perplectic', 'orthogonal')
RESIDUAL_TOL = 1e-12
MAX_TRIES = 20

# eigenvalue arguments avoid the imaginary axis and the negative real axis
_ARG_BANDS = ((0.15, math.pi / 2 - 0.25), (math.pi / 2 + 0.25, math.pi - 0.15))


@dataclass(frozen=True)
class GroupForm:
    """
    Bilinear form ``M`` defining an automorphism group.

    Use the constructors :meth:`symplectic`, :meth:`pseudo_orthogonal`,
    :meth:`perplectic` and :meth:`orthogonal` (or :func:`group_form`).
    """
    kind: str
    M: np.ndarray
    p: int = None
    q: int = None

    @property
    def n(self):
        return self.M.shape[0]

    @classmethod
    def symplectic(cls, n):
        if n < 2 or n % 2:
            raise ShapeMismatch(f'symplectic requires even n, got n = {n}')
        m = n // 2
        M = np.zeros((n, n))
        M[:m, m:] = np.eye(m)
        M[m:, :m] = -np.eye(m)
        return cls('symplectic', M)

    @classmethod
    def pseudo_orthogonal(cls, p, q):
        if p < 0 or q < 0 or p + q < 1:
            raise ShapeMismatch(f'bad signature p={p}, q={q}')
        M = np.diag(np.r_[np.ones(p), -np.ones(q)])
        return cls('pseudo_orthogonal', M, p, q)

    @classmethod
    def perplectic(cls, n):
        if n < 1:
            raise ShapeMismatch(f'n must be positive, got {n}')
        return cls('perplectic', np.fliplr(np.eye(n)))

    @classmethod
    def orthogonal(cls, n):
        if n < 1:
            raise ShapeMismatch(f'n must be positive, got {n}')
        return cls('orthogonal', np.eye(n))

    def lie_form(self):
        """``+1`` if ``M S`` is symmetric on the Lie algebra, ``-1`` if skew."""
        return 1 if self.kind == 'symplectic' else -1


def group_form(kind, n, p=None):
    """
    Form of size ``n``.  Pseudo-orthogonal forms default to
    ``p = ceil(n / 2)``.
    """
    if kind == 'symplectic':
        return GroupForm.symplectic(n)
    if kind == 'pseudo_orthogonal':
        p = (n + 1) // 2 if p is None else p
        if not 0 <= p <= n:
            raise ShapeMismatch(f'p={p} outside [0, {n}]')
        return GroupForm.pseudo_orthogonal(p, n - p)
    if kind == 'perplectic':
        return GroupForm.perplectic(n)
    if kind == 'orthogonal':
        return GroupForm.orthogonal(n)
    raise ValueError(f'unknown group kind {kind!r}; expected one of '
                     f'{GROUP_KINDS}')


def group_residual(X, g):
    """
    ``||X^T M X - M||_F``.

    Raises
    ------
    ShapeMismatch
        ``X`` is not square of the size of ``M``.
    """
    X = as_matrix(X, 'X')
    if X.shape != g.M.shape:
        raise ShapeMismatch(f'X is {X.shape} but the form is {g.M.shape}')
    return frob_norm(X.T @ g.M @ X - g.M)


def cayley(S):
    """``(I - S)(I + S)^{-1}``; maps the Lie algebra of a form to its group."""
    S = as_matrix(S, 'S', square=True)
    I = np.eye(S.shape[0], dtype=S.dtype)
    return solve_right(I - S, I + S)


def lie_element(g, K):
    """
    ``M^T K`` after (skew-)symmetrizing ``K`` so the result is in the Lie
    algebra ``{S : S^T M + M S = 0}``.
    """
    K = as_matrix(K, 'K', square=True)
    K = 0.5 * (K + g.lie_form() * K.T)
    return g.M.T @ K


@dataclass(frozen=True)
class GenSpec:
    """
    Recipe for :func:`random_automorphism`; equal specs give bitwise
    equal matrices.

    Parameters
    ----------
    kind : str
        One of ``GROUP_KINDS``.
    n : int
    target_cond : float
        Desired ``||G||_F ||G^{-1}||_F``, at least 1.
    seed : int
        Non-negative, below ``2**64``.
    p : int, optional
        Positive part of a pseudo-orthogonal signature.
    """
    kind: str
    n: int
    target_cond: float
    seed: int
    p: int = None

    def __post_init__(self):
        if self.kind not in GROUP_KINDS:
            raise ValueError(f'unknown group kind {self.kind!r}')
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f'n must be an integer >= 2, got {self.n}')
        if self.kind == 'symplectic' and self.n % 2:
            raise ValueError(f'symplectic requires even n, got n = {self.n}')
        if not self.target_cond >= 1:
            raise ValueError(f'target_cond must be >= 1, '
                             f'got {self.target_cond}')
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ValueError(f'seed must be a 64-bit non-negative integer, '
                             f'got {self.seed}')

    @property
    def form(self):
        return group_form(self.kind, self.n, self.p)


def random_direction(n, m, seed):
    """``n x m`` matrix with i.i.d. uniform ``[0, 1)`` entries."""
    return np.random.default_rng(seed).random((n, m))


# -- canonical cores -----------------------------------------------------------

def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _angles(rng, has_real):
    """
    Angles alternating between the bands, so two rotated blocks always land
    in opposite half-planes.  A core that also has real positive eigenvalues
    starts on the left, so its first rotated block already mixes.
    """
    j = 1 if has_real else int(rng.integers(2))
    while True:
        lo, hi = _ARG_BANDS[j]
        yield rng.uniform(lo, hi)
        j ^= 1


def _symplectic_core(n, rng):
    m = n // 2
    angles = _angles(rng, m % 2)
    blocks = []
    for i in range(0, m - 1, 2):
        blocks.append((i, rng.uniform(0.3, 1.0), next(angles)))
    single = rng.uniform(0.3, 1.0) if m % 2 else None

    def core(gamma):
        D = np.zeros((m, m))
        Di = np.zeros((m, m))
        for i, u, th in blocks:
            rho = math.exp(gamma * u)
            D[i:i + 2, i:i + 2] = rho * _rot(th)
            Di[i:i + 2, i:i + 2] = _rot(th) / rho
        if single is not None:
            D[-1, -1] = math.exp(gamma * single)
            Di[-1, -1] = 1 / D[-1, -1]
        Z = np.zeros((m, m))
        return np.block([[D, Z], [Z, Di]])
    return core


def _sigma_core(p, q, rng):
    n = p + q
    P, Q = list(range(p)), list(range(p, n))
    k = min(p, q)
    angles = _angles(rng, k % 2 or (p - k) % 2 or (q - k) % 2)
    boosts = []     # (coords, u, theta or None)
    for i in range(0, k - 1, 2):
        boosts.append(((P[i], P[i + 1], Q[i], Q[i + 1]),
                       rng.uniform(0.3, 1.0), next(angles)))
    if k % 2:
        boosts.append(((P[k - 1], Q[k - 1]), rng.uniform(0.3, 1.0), None))
    rots = []
    for rest in (P[k:], Q[k:]):
        for i in range(0, len(rest) - 1, 2):
            rots.append(((rest[i], rest[i + 1]), next(angles)))

    def core(gamma):
        G = np.eye(n)
        for idx, u, th in boosts:
            t = gamma * u
            B = np.array([[math.cosh(t), math.sinh(t)],
                          [math.sinh(t), math.cosh(t)]])
            G[np.ix_(idx, idx)] = B if th is None else np.kron(B, _rot(th))
        for idx, th in rots:
            G[np.ix_(idx, idx)] = _rot(th)
        return G
    return core


def _perplectic_basis(n):
    """Orthogonal ``Q`` with ``R = Q diag(I_p, -I_q) Q^T``."""
    half = n // 2
    Q = np.zeros((n, n))
    s = 1 / math.sqrt(2)
    for i in range(half):
        Q[i, i] = Q[n - 1 - i, i] = s
        Q[i, n - half + i] = s
        Q[n - 1 - i, n - half + i] = -s
    if n % 2:
        Q[half, half] = 1.0
    return Q, n - half


def _core_factory(g, rng):
    if g.kind == 'symplectic':
        return _symplectic_core(g.n, rng)
    if g.kind == 'pseudo_orthogonal':
        return _sigma_core(g.p, g.q, rng)
    if g.kind == 'perplectic':
        Q, p = _perplectic_basis(g.n)
        inner = _sigma_core(p, g.n - p, rng)
        return lambda gamma: Q @ inner(gamma) @ Q.T
    stream = _angles(rng, g.n % 2)
    angles = [next(stream) for _ in range(g.n // 2)]

    def core(gamma):
        G = np.eye(g.n)
        for j, th in enumerate(angles):
            G[2 * j:2 * j + 2, 2 * j:2 * j + 2] = _rot(th)
        return G
    return core


# -- steering ----------------------------------------------------------------

def _bisect(f, target, lo, hi, grow, steps=60, max_grow=60):
    """Smallest-ish ``x`` in ``[lo, ...)`` with ``f(x) ~ target``, or None."""
    for _ in range(max_grow):
        if f(hi) >= target:
            break
        lo, hi = hi, hi * grow
    else:
        return None
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def _certified(G):
    from .sylvester import reference_value
    try:
        reference_value('sign', G)
        reference_value('sqrt', G)
    except (MatfunError, ArithmeticError):
        return False
    return True


def _sample(g, target, rng):
    n = g.n
    core = _core_factory(g, rng)
    S1 = lie_element(g, rng.standard_normal((n, n))) / math.sqrt(n)
    M = g.M

    def conj(G0, beta):
        T = cayley(beta * S1)
        return T @ G0 @ (M.T @ T.T @ M)

    if g.kind == 'orthogonal' or target <= n:
        return conj(core(0.0), 0.0 if target <= n else 1.0)
    sq = lambda X: frob_norm(X) ** 2
    gamma = _bisect(lambda c: sq(core(c)), n + 0.5 * (target - n), 0.0, 1.0,
                    2.0)
    if gamma is None:
        return None
    G0 = core(gamma)
    beta = _bisect(lambda b: sq(conj(G0, b)), target, 0.0, 0.05, 1.5)
    if beta is not None:
        return conj(G0, beta)
    # conjugation cannot raise the conditioning (e.g. a one-dimensional
    # Lie algebra); let the core alone carry the target
    gamma = _bisect(lambda c: sq(core(c)), target, 0.0, 1.0, 2.0)
    return None if gamma is None else core(gamma)


def random_automorphism(spec):
    """
    Random element of the automorphism group described by ``spec``.

    The result satisfies ``group_residual <= 1e-12``, has a Frobenius
    condition number in ``[target/2, 5 target]``, and its sign and square
    root pass reference certification.  Samples violating any of these are
    redrawn up to 20 times.

    Apart from the orthogonal group, from ``n = 5`` on the spectrum has
    eigenvalues in both half-planes, so the matrix sign is never ``+-I``.
    At ``n = 4`` the single rotated block cannot straddle the imaginary
    axis without a negative real eigenvalue.

    Parameters
    ----------
    spec : GenSpec

    Returns
    -------
    ndarray

    Raises
    ------
    GenerationFailed
    """
    g = spec.form
    target = float(spec.target_cond)
    if 5 * target < g.n:
        raise GenerationFailed(
            f'target_cond {target:g} unreachable: the Frobenius condition '
            f'number of an n = {g.n} matrix is at least {g.n}')
    rng = np.random.default_rng(spec.seed)
    last = 'no sample'
    for _ in range(MAX_TRIES):
        try:
            G = _sample(g, target, rng)
        except SingularMatrix:
            G = None
        if G is None:
            last = 'conditioning steering failed'
            continue
        res = group_residual(G, g)
        if not res <= RESIDUAL_TOL:
            last = f'group residual {res:.2e}'
            continue
        c = cond_estimate(G)
        if not target / 2 <= c <= 5 * target:
            last = f'condition number {c:.3g}'
            continue
        if not _certified(G):
            last = 'sign/sqrt certification failed'
            continue
        return G
    raise GenerationFailed(f'no acceptable {spec.kind} sample in '
                           f'{MAX_TRIES} tries (last: {last})')
