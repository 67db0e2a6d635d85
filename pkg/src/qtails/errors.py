"""Exception types shared by all qtails modules."""


class QTailsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QTailsError, ValueError):
    """An argument violates a documented precondition (wrong sign, range, ...)."""


class RangeError(QTailsError, ValueError):
    """A requested target value lies outside the attainable range."""


class DivergenceError(QTailsError, ArithmeticError):
    """A quantity required to be finite diverges for the given parameters."""


class QuadratureError(QTailsError, RuntimeError):
    """Adaptive quadrature failed to reach its error target.

    The best error estimate achieved is kept in :attr:`estimate`.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class ConfigError(QTailsError, ValueError):
    """Invalid command-line or run configuration."""
