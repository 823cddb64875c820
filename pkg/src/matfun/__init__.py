"""
Matrix sign, square root and polar factor by Newton and Padé iterations,
with Fréchet derivatives by Sylvester solves, coupled iterations and the
complex-step method, plus automorphism-group test matrices.
"""
from .errors import GenerationFailed, InsufficientData, MatfunError, \
    NotConverged, ProblemTooLarge, RankDeficient, ShapeMismatch, \
    SingularMatrix, StepTooLarge, UnsupportedOrder
from .experiment import ExperimentConfig, RunSummary, SchemeSummary, \
    run_experiment
from .frechet import CoupledResult, CsResult, SecondFrechetResult, \
    coupled_newton, coupled_pade, cs_derivative, cs_vs_coupled_gap, \
    second_frechet_cs
from .groups import GenSpec, GroupForm, group_form, group_residual, \
    random_automorphism, random_direction
from .iterations import IterOptions, IterationTrace, db_sqrt, \
    estimate_order, newton_polar, newton_sign, newton_sqrt, pade_polar, \
    pade_rational_apply, pade_sign, pade_sqrt
from .linalg import cond_estimate, format_matrix, frob_norm, inverse, \
    parse_matrix, read_matrix, solve_linear, write_matrix
from .sylvester import SylvesterProblem, frechet_direct, reference_value, \
    solve_sylvester

__version__ = '0.1.0'
