"""Exception hierarchy.

Input/contract violations derive from :class:`ValueError`; numerical failures
derive from :class:`NumericalError`. The CLI maps the former to exit code 2
and the latter to exit code 3.
"""


class MeanMotionError(Exception):
    """Base class for all package errors."""


class ValidationError(MeanMotionError, ValueError):
    """Input fails a documented precondition."""


class AssumptionError(ValidationError):
    """The system matrix does not have a simple, purely imaginary spectrum."""


class NumericalError(MeanMotionError, ArithmeticError):
    """A numerical routine failed to reach its contract."""


class SpectralError(NumericalError):
    """Eigenvalue iteration did not converge."""


class QuadratureError(NumericalError):
    """Quadrature could not reach the requested tolerance.

    ``best_value`` and ``residual`` carry the best estimate reached.
    """

    def __init__(self, message: str, best_value: float = float("nan"), residual: float = float("inf")):
        super().__init__(message)
        self.best_value = best_value
        self.residual = residual


class TrajectoryError(NumericalError):
    """The oscillator sum came too close to the origin to track its argument."""
