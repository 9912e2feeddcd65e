"""Exception hierarchy for the bvf package.

Every error raised by this package derives from :class:`BvfError`, so callers
can catch one base class. Validation-type errors additionally derive from
``ValueError`` and numerical/estimation failures from ``RuntimeError``,
keeping standard idioms (``except ValueError``) functional.
"""

__all__ = [
    "BvfError",
    "DomainError",
    "ValidationError",
    "ParseError",
    "EstimationError",
    "DegenerateDataError",
    "SingularMatrixError",
    "ResampleFailureError",
    "SelectionError",
]


class BvfError(Exception):
    """Base class for all bvf errors."""


class DomainError(BvfError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(BvfError, ValueError):
    """Data, file content, or configuration violates a structural invariant."""


class ParseError(ValidationError):
    """A file could not be parsed; the message carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EstimationError(BvfError, RuntimeError):
    """Maximum-likelihood estimation could not be carried out."""


class DegenerateDataError(EstimationError):
    """The data render the likelihood degenerate (defensive; should not occur
    for strictly positive lifetimes)."""


class SingularMatrixError(EstimationError):
    """The observed information matrix is not positive definite; confidence
    intervals are unavailable."""


class ResampleFailureError(EstimationError):
    """Too many bootstrap resamples failed to produce an estimate."""


class SelectionError(BvfError, RuntimeError):
    """No candidate model produced a usable fit."""
