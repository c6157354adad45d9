"""Exception types shared across the package."""


class PHError(ValueError):
    """Base class for domain errors raised by this package."""


class DimensionError(PHError):
    pass


class NotPositiveDefiniteError(PHError):
    pass


class DomainError(PHError):
    pass


class StepSizeError(PHError):
    """Raised when an implicit step hits a singular linear system."""


class PreconditionError(PHError):
    pass


class DivergenceError(RuntimeError):
    """Training loss stayed non-finite; carries the partial report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
