"""Command-line front end for :func:`matfun.experiment.run_experiment`."""
import argparse
import sys

from .errors import GenerationFailed
from .experiment import FUNCTIONS, SCHEMES, ExperimentConfig, run_experiment
from .frechet import DEFAULT_H
from .groups import GROUP_KINDS
from .linalg import read_matrix

__all__ = ['cli_main']

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default, which is reserved here for
    # numeric failures
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _parser():
    p = _Parser(prog='matfun',
                description='Convergence experiment for complex-step '
                            'matrix function derivatives.')
    p.add_argument('--function', required=True, choices=FUNCTIONS)
    p.add_argument('--scheme', action='append', choices=SCHEMES,
                   help='repeatable; default: all three')
    p.add_argument('--n', type=int, default=50)
    p.add_argument('--group', default='symplectic', choices=GROUP_KINDS)
    p.add_argument('--cond', type=float, default=80.0)
    p.add_argument('--h', type=float, default=DEFAULT_H)
    p.add_argument('--tol', type=float, default=1e-8)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', help='directory for CSV files and summary.txt')
    p.add_argument('--matrix-file', help='read A from this file')
    p.add_argument('--direction-file', help='read E from this file')
    p.add_argument('--quiet', action='store_true')
    return p


def cli_main(argv=None):
    """
    Run one experiment; returns 0 when every scheme converged, 2 on a
    numeric failure and 1 on usage or I/O errors.
    """
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f'matfun: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:      # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        A = read_matrix(args.matrix_file) if args.matrix_file else None
        E = read_matrix(args.direction_file) if args.direction_file else None
        cfg = ExperimentConfig(
            function=args.function, schemes=tuple(args.scheme or SCHEMES),
            n=args.n, group=args.group, target_cond=args.cond, h=args.h,
            tol=args.tol, seed=args.seed, output_dir=args.out, matrix=A,
            direction=E)
    except (OSError, ValueError) as exc:
        print(f'matfun: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    try:
        summary = run_experiment(cfg)
    except (OSError, ValueError) as exc:
        print(f'matfun: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, GenerationFailed) as exc:
        print(f'matfun: {exc}', file=sys.stderr)
        return EXIT_NUMERIC
    if not args.quiet:
        sys.stdout.write(summary.format_table())
    for s in summary.schemes:
        if s.error:
            print(f'matfun: {s.scheme}: {s.error}', file=sys.stderr)
    return EXIT_OK if summary.all_converged else EXIT_NUMERIC
