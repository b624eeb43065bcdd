"""Exception hierarchy shared by the library and the CLI exit-code mapping."""

from __future__ import annotations


class CyclePolyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CyclePolyError, ValueError):
    """Malformed or out-of-range input (CLI exit code 2)."""


class NoEulerianCircuitError(InvalidInputError):
    """The graph has no Eulerian circuit; ``vertex`` is a witness."""

    def __init__(self, message: str, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class NotInPolytopeError(InvalidInputError):
    """A point handed to a constructive routine lies outside the polytope."""

    def __init__(self, message: str, violation: str | None = None):
        super().__init__(message)
        self.violation = violation


class BudgetExceededError(CyclePolyError, RuntimeError):
    """A configured enumeration budget was hit (CLI exit code 3).

    ``partial`` is the number of items produced before giving up.
    """

    def __init__(self, message: str, partial: int | None = None):
        super().__init__(message)
        self.partial = partial


class CrossCheckError(CyclePolyError, AssertionError):
    """Two independent computations disagreed (CLI exit code 4)."""
