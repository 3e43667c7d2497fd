"""Exception hierarchy shared by the analytic, simulation and CLI layers."""

from __future__ import annotations


class PuSenseError(Exception):
    """Base class for all package errors."""


class DomainError(PuSenseError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(PuSenseError):
    """Root finding was given an interval without a sign change."""


class ConvergenceError(PuSenseError):
    """An iterative method did not converge within its budget."""


class DegenerateModelError(PuSenseError):
    """A weight table carries no probability mass."""


class EstimationError(PuSenseError):
    """A Monte Carlo class had no usable trials."""
