"""Exception hierarchy shared by every module of the package."""


class MatfunError(Exception):
    """Base class for all errors raised by :mod:`matfun`."""


class ShapeMismatch(MatfunError, ValueError):
    """Operands have incompatible shapes."""


class SingularMatrix(MatfunError, ArithmeticError):
    """A pivot fell below the singularity threshold during a linear solve.

    Attributes
    ----------
    step : int or None
        Iteration index at which the solve failed, when raised from inside
        an iteration.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class RankDeficient(SingularMatrix):
    """The Gram matrix of a rectangular operand is numerically singular."""


class NotConverged(MatfunError, ArithmeticError):
    """
    An iteration exhausted ``max_iter``, diverged, or stalled.

    Attributes
    ----------
    trace : IterationTrace or None
    reason : {'max_iter', 'diverged', 'stalled', 'certification'}
    """

    def __init__(self, message, trace=None, reason='max_iter'):
        super().__init__(message)
        self.trace = trace
        self.reason = reason


class UnsupportedOrder(MatfunError, ValueError):
    """Padé order outside the supported set {1, 2}."""


class InsufficientData(MatfunError, ValueError):
    """Too few qualifying iterates to estimate a convergence order."""


class StepTooLarge(MatfunError, ArithmeticError):
    """The complex step ``h`` contaminated the real part beyond tolerance."""


class GenerationFailed(MatfunError, RuntimeError):
    """The structured generator could not meet its conditioning band."""


class ProblemTooLarge(MatfunError, ValueError):
    """Dense Kronecker formulation requested beyond its size limit."""
