"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class MLDistError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(MLDistError, ValueError):
    """A parameter or argument lies outside the domain of an operation."""

    exit_code = 2


class NumericalError(MLDistError, ArithmeticError):
    """Base class for numerical failures."""

    exit_code = 3


class SeriesNonConvergence(NumericalError):
    """The series did not meet its stopping rule within ``max_terms``."""


class CancellationError(NumericalError):
    """The ratio of the largest term to the sum exceeded the cancellation guard."""

    def __init__(self, message, ratio=float("nan")):
        super().__init__(message)
        self.ratio = ratio


class QuadratureError(NumericalError):
    """An integral could not be evaluated to the requested accuracy."""

    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s


class StatisticalTestFailure(MLDistError):
    """A goodness-of-fit or Monte Carlo consistency check failed."""

    exit_code = 4
