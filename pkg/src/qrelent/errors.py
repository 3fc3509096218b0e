"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(ValueError):
    """A matrix or configuration object violates a structural invariant."""


class SingularityError(ArithmeticError):
    """A spectrum touches zero where a logarithm is required."""


class UnsupportedLimitError(ValueError):
    """The requested large-dimension limit has no published closed form."""


class ConsistencyError(RuntimeError):
    """An internal exact computation produced an impossible result."""
