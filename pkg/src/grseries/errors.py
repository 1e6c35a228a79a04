"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InvariantError(AssertionError):
    """An internal cross-check between two independent computations failed."""
