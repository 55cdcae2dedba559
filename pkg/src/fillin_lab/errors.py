"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` used by the command-line front end.
"""

from __future__ import annotations


class FillinError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class PreconditionError(FillinError, ValueError):
    """An input violates a documented precondition."""

    exit_code = 2


class DomainError(PreconditionError):
    """A parameter lies outside the validity window of a formula."""


class DegenerateMetricError(PreconditionError):
    """A metric or deformation is singular (pole irregularity, 1 + wk <= 0, ...)."""


class AlignmentError(PreconditionError):
    """Two objects that must share a grid do not."""


class ResolutionError(PreconditionError):
    """Too few samples, or a field that the metric representation cannot resolve."""


class NumericalFailure(FillinError, RuntimeError):
    """An iterative solver did not reach its tolerance."""

    exit_code = 3

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
