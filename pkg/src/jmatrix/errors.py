"""Shared exception types.

Modules define their own specific subclasses where useful; the CLI maps
ValidationError (and ValueError generally) to exit status 1 and
InternalConsistencyError to exit status 2.
"""


class JMatrixError(Exception):
    """Base class for package-specific failures."""


class ValidationError(JMatrixError, ValueError):
    """A model, operator, or argument violates its documented preconditions."""


class ConvergenceError(JMatrixError, RuntimeError):
    """An iterative scheme hit its cap without meeting its tolerance."""


class InternalConsistencyError(JMatrixError, RuntimeError):
    """Two independent computations of the same quantity disagree."""
