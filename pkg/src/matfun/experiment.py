"""
Convergence experiments: complex-step iterations measured against
reference values, with per-step CSV output.

For every scheme the complex-step iteration is started from
``A + i h E`` and stepped until the relative errors

    R_k = ||Re X_hat_k - F(A)||_F / ||F(A)||_F
    S_k = ||Im X_hat_k / h - L(A, E)||_F / ||L(A, E)||_F

both drop below ``tol``.  Alongside, the coupled iteration is stepped to
record the gap ``T_k`` and the value iterate's group residual.
"""
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import MatfunError, NotConverged, SingularMatrix
from .frechet import DEFAULT_H, coupled_iterates, coupled_pade, \
    cs_iterates, gap_statistic
from .groups import GROUP_KINDS, GenSpec, group_form, random_automorphism, \
    random_direction
from .iterations import IterOptions, order_from_errors
from .linalg import as_matrix, frob_norm
from .sylvester import KRONECKER_MAX_N, frechet_direct, reference_value

__all__ = ['FUNCTIONS', 'SCHEMES', 'ExperimentConfig', 'SchemeSummary',
           'RunSummary', 'run_experiment', 'default_max_iter']

FUNCTIONS = ('sign', 'sqrt', 'polar')
SCHEMES = ('newton', 'pade1', 'pade2')
CSV_HEADER = 'k,R,S,group_residual,T'
MAX_ITER_ENV = 'MATFUN_MAX_ITER'

_UNDEFINED = {
    'sign': 'sign undefined: A appears to have imaginary-axis eigenvalues',
    'sqrt': 'square root undefined: A appears to have eigenvalues on the '
            'closed negative real axis',
    'polar': 'polar factor undefined: A appears to be rank deficient',
}


def default_max_iter():
    """100, or the integer in ``$MATFUN_MAX_ITER``."""
    raw = os.environ.get(MAX_ITER_ENV)
    if raw is None or raw.strip() == '':
        return 100
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f'{MAX_ITER_ENV} must be an integer, '
                         f'got {raw!r}') from None
    if value < 1:
        raise ValueError(f'{MAX_ITER_ENV} must be positive, got {value}')
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One experiment.

    ``matrix`` and ``direction`` override the generated input and the
    random direction; ``n``, ``group``, ``target_cond`` and ``seed`` then
    only matter for what is not overridden.
    """
    function: str
    schemes: tuple
    n: int = 50
    group: str = 'symplectic'
    target_cond: float = 80.0
    h: float = DEFAULT_H
    tol: float = 1e-8
    seed: int = 0
    output_dir: str = None
    matrix: np.ndarray = field(default=None, repr=False)
    direction: np.ndarray = field(default=None, repr=False)
    max_iter: int = None

    def __post_init__(self):
        if self.function not in FUNCTIONS:
            raise ValueError(f'function must be one of {FUNCTIONS}, '
                             f'got {self.function!r}')
        schemes = tuple(self.schemes)
        if not schemes:
            raise ValueError('at least one scheme is required')
        for s in schemes:
            if s not in SCHEMES:
                raise ValueError(f'scheme must be one of {SCHEMES}, '
                                 f'got {s!r}')
        object.__setattr__(self, 'schemes', tuple(dict.fromkeys(schemes)))
        if not self.tol > 0:
            raise ValueError(f'tol must be positive, got {self.tol}')
        if not self.h > 0:
            raise ValueError(f'h must be positive, got {self.h}')
        if self.group not in GROUP_KINDS:
            raise ValueError(f'group must be one of {GROUP_KINDS}, '
                             f'got {self.group!r}')
        if self.matrix is None:
            # validates n, parity and conditioning target
            GenSpec(self.group, self.n, self.target_cond, self.seed)
            if 5 * self.target_cond < self.n:
                raise ValueError(f'--cond {self.target_cond:g} is below '
                                 f'n/5: a Frobenius condition number is '
                                 f'at least n = {self.n}')
        if self.max_iter is None:
            object.__setattr__(self, 'max_iter', default_max_iter())
        elif self.max_iter < 1:
            raise ValueError(f'max_iter must be positive, got {self.max_iter}')


@dataclass(frozen=True)
class SchemeSummary:
    scheme: str
    converged: bool
    iterations: int
    final_R: float
    final_S: float
    max_group_residual: float
    max_gap: float
    order: float
    error: str = None


@dataclass(frozen=True)
class RunSummary:
    config: ExperimentConfig
    schemes: tuple

    @property
    def all_converged(self):
        return all(s.converged for s in self.schemes)

    def __getitem__(self, scheme):
        for s in self.schemes:
            if s.scheme == scheme:
                return s
        raise KeyError(scheme)

    def format_table(self):
        cfg = self.config
        A_desc = ('matrix file' if cfg.matrix is not None else
                  f'{cfg.group} n={cfg.n} cond={cfg.target_cond:g} '
                  f'seed={cfg.seed}')
        lines = [f'function: {cfg.function}   input: {A_desc}   '
                 f'h={cfg.h:.3g}   tol={cfg.tol:.3g}',
                 f'{"scheme":<8}{"status":>14}{"iters":>7}{"R":>11}'
                 f'{"S":>11}{"max grp":>11}{"max T":>11}{"order":>8}']
        for s in self.schemes:
            status = 'converged' if s.converged else 'FAILED'
            lines.append(f'{s.scheme:<8}{status:>14}{s.iterations:>7d}'
                         f'{s.final_R:>11.3e}{s.final_S:>11.3e}'
                         f'{s.max_group_residual:>11.3e}{s.max_gap:>11.3e}'
                         f'{s.order:>8.3f}')
            if s.error:
                lines.append(f'  {s.scheme}: {s.error}')
        return '\n'.join(lines) + '\n'


def _cs_kind(function, scheme):
    if function == 'sign':
        return 'sign'
    if function == 'polar':
        return 'polar_t'
    return 'db' if scheme == 'newton' else 'sqrt'


def _describe(function, exc):
    if isinstance(exc, SingularMatrix):
        where = f' (solve singular at step {exc.step})' if exc.step else ''
        return f'{_UNDEFINED[function]}{where}'
    return str(exc)


def _inputs(cfg):
    if cfg.matrix is not None:
        A = as_matrix(cfg.matrix)
    else:
        A = random_automorphism(GenSpec(cfg.group, cfg.n, cfg.target_cond,
                                        cfg.seed))
    if cfg.direction is not None:
        E = as_matrix(cfg.direction, 'E')
    else:
        E = random_direction(*A.shape, seed=(cfg.seed + 1) % 2 ** 64)
    if np.iscomplexobj(A) or np.iscomplexobj(E):
        raise ValueError('experiments need real A and E')
    if E.shape != A.shape:
        raise ValueError(f'direction is {E.shape} but A is {A.shape}')
    if cfg.function != 'polar' and A.shape[0] != A.shape[1]:
        raise ValueError(f'{cfg.function} needs a square matrix, '
                         f'got {A.shape}')
    if cfg.function == 'polar' and A.shape[0] < A.shape[1]:
        raise ValueError(f'polar factor needs rows >= cols, got {A.shape}')
    return A, E


def _references(function, A, E):
    """``F(A)`` and ``L(A, E)`` from the direct route where affordable."""
    F = reference_value(function, A)
    if max(A.shape) <= KRONECKER_MAX_N:
        return F, frechet_direct(function, A, E)
    kind = 'polar_t' if function == 'polar' else function
    opts = IterOptions(tol=1e-13, max_iter=200)
    return F, coupled_pade(kind, A, E, 2, opts).derivative


def _fmt(x):
    return '%.17g' % x


def _run_scheme(cfg, scheme, A, E, F, L, form):
    kind = _cs_kind(cfg.function, scheme)
    h, tol = cfg.h, cfg.tol
    nF, nL = frob_norm(F), frob_norm(L)
    scale = (nF + nL) or 1.0
    rows = []
    hats = cs_iterates(kind, scheme, A, E, h)
    pairs = coupled_iterates(kind, scheme, A, E)
    M = form.M if form is not None and form.M.shape == A.shape else None
    error = None
    k = 0
    try:
        while True:
            Xh = next(hats)
            X, D = next(pairs)
            R = frob_norm(Xh.real - F) / nF
            dS = frob_norm(Xh.imag / h - L)
            S = dS / nL if nL else dS
            g = (frob_norm(Xh.real.T @ M @ Xh.real - M) if M is not None
                 else math.nan)
            rows.append((k, R, S, g, gap_statistic(X, D, Xh, h, scale)))
            if not (math.isfinite(R) and math.isfinite(S)):
                raise NotConverged(f'iterates became non-finite at step {k}',
                                   reason='diverged')
            if R < tol and S < tol:
                break
            if k >= cfg.max_iter:
                raise NotConverged(f'no convergence to tol={tol:g} within '
                                   f'{cfg.max_iter} iterations',
                                   reason='max_iter')
            k += 1
    except (MatfunError, ArithmeticError) as exc:
        error = _describe(cfg.function, exc)
    return rows, error


def _order(rows):
    try:
        return order_from_errors([r[1] for r in rows],
                                 float(np.finfo(float).eps))
    except MatfunError:
        return math.nan


def _write_csv(path, rows):
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(CSV_HEADER + '\n')
        for k, *vals in rows:
            fh.write(','.join([str(k)] + [_fmt(v) for v in vals]) + '\n')


def _nanmax(values):
    values = [v for v in values if not math.isnan(v)]
    return max(values) if values else math.nan


def run_experiment(cfg):
    """
    Run every scheme of ``cfg`` and write ``<scheme>.csv`` plus
    ``summary.txt`` into ``cfg.output_dir`` (skipped when it is None).

    Numeric failures are recorded per scheme; the remaining schemes still
    run.

    Returns
    -------
    RunSummary
    """
    A, E = _inputs(cfg)
    form = None
    if A.shape[0] == A.shape[1]:
        try:
            form = group_form(cfg.group, A.shape[0])
        except MatfunError:
            form = None
    try:
        F, L = _references(cfg.function, A, E)
        ref_error = None
    except (MatfunError, ArithmeticError) as exc:
        ref_error = f'reference: {_describe(cfg.function, exc)}'
    if cfg.output_dir is not None:
        os.makedirs(cfg.output_dir, exist_ok=True)

    results = []
    for scheme in cfg.schemes:
        if ref_error is not None:
            rows, error = [], ref_error
        else:
            rows, error = _run_scheme(cfg, scheme, A, E, F, L, form)
        if cfg.output_dir is not None:
            _write_csv(os.path.join(cfg.output_dir, f'{scheme}.csv'), rows)
        last = rows[-1] if rows else (0, math.nan, math.nan, math.nan,
                                      math.nan)
        results.append(SchemeSummary(
            scheme=scheme, converged=error is None,
            iterations=last[0], final_R=last[1], final_S=last[2],
            max_group_residual=_nanmax([r[3] for r in rows]),
            max_gap=_nanmax([r[4] for r in rows]),
            order=_order(rows) if rows else math.nan, error=error))
    summary = RunSummary(cfg, tuple(results))
    if cfg.output_dir is not None:
        with open(os.path.join(cfg.output_dir, 'summary.txt'), 'w',
                  encoding='utf-8', newline='\n') as fh:
            fh.write(summary.format_table())
    return summary
