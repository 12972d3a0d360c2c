"""Exception types shared across the package."""


class GlasdError(Exception):
    """Base class for all package-specific errors."""


class DomainMismatchError(GlasdError):
    """Point, matrix, or angle-vector dimensions do not agree."""


class NotPositiveDefiniteError(GlasdError):
    """A matrix required to be positive definite is not."""


class ObjectiveEvaluationError(GlasdError):
    """The objective raised while being evaluated at a feasible point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class MalformedDataError(GlasdError):
    """Input data file cannot be parsed (ragged rows, non-numeric cells, NaN/inf)."""


class DegenerateDataError(GlasdError):
    """Input data is numerically unusable (e.g. a zero-variance column)."""


class ConfigError(GlasdError):
    """A configuration file or option value is invalid."""
