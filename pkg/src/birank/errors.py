"""Exception types shared across the package."""


class BirankError(Exception):
    """Base class for all library errors."""


class BudgetExceeded(BirankError):
    """A configured work bound (digits, iterations, time) was hit."""


class PrecisionExceeded(BirankError):
    """A p-adic or real-precision verdict could not be certified."""


class SingularCurve(BirankError):
    """The model has a repeated root."""


class ParameterViolation(BirankError):
    """A family hypothesis is not met by the supplied parameters."""

    def __init__(self, constraint, message=None):
        self.constraint = constraint
        super().__init__(message or constraint)


class MapIdentityFailed(BirankError):
    """A constructed quotient map does not satisfy its defining identity."""


class Inconsistency(BirankError):
    """Two independent computations disagree."""


class PreconditionFailed(BirankError, ValueError):
    """An operation was called on an input outside its domain."""
