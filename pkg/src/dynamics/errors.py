"""Exception hierarchy shared by the numerical packages."""


class DomainError(ValueError):
    """Base class for failures that come from the mathematics, not from input files."""


class CollisionError(DomainError):
    """A point or curve entered the collision neighbourhood of a body."""

    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance


class PreconditionError(DomainError):
    """An operation was called on data that violates its precondition."""


class SearchError(DomainError):
    """An equilibrium search produced no usable result."""


class ClassificationError(DomainError):
    """A degenerate configuration cannot be classified."""
