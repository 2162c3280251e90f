"""Exception types raised across the package."""


class HierEsnError(Exception):
    """Base class for all package errors."""


class DimensionError(HierEsnError, ValueError):
    pass


class ConvergenceError(HierEsnError, RuntimeError):
    """Iterative solver ran out of iterations.

    ``estimate`` holds the best value reached before giving up.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SingularSystemError(HierEsnError, ArithmeticError):
    pass


class DegenerateInputError(HierEsnError, ValueError):
    """Input has zero variance or zero range where a spread is required."""


class BuildError(HierEsnError, RuntimeError):
    pass


class DataError(HierEsnError, ValueError):
    """Malformed or insufficient task data."""


class InsufficientDataError(DataError):
    def __init__(self, message, shortfall=0):
        super().__init__(message)
        self.shortfall = shortfall
