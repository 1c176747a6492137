"""Exception hierarchy.

Everything raised on bad inputs or numerical failure derives from
``DomainError`` so callers (and the CLI) can separate domain failures
from programming errors.
"""


class DomainError(ValueError):
    """Base class for all domain-level failures."""


class InvalidDimensionError(DomainError):
    pass


class InvalidParameterError(DomainError):
    pass


class InvalidInputError(DomainError):
    pass


class DimensionMismatchError(DomainError):
    pass


class OutOfDomainError(DomainError):
    pass


class NoSolutionError(DomainError):
    pass


class ConvergenceError(DomainError):
    pass


class ContractionViolatedError(DomainError):
    pass


class QuadratureError(DomainError):
    pass


class NonFiniteError(DomainError):
    """A non-finite value appeared during an iteration.

    ``iteration`` holds the index of the step that produced it.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
