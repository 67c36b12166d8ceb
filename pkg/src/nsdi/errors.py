"""Exception hierarchy: dataset problems, domain violations, propagation failures."""

from __future__ import annotations


class NsdiError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(NsdiError, ValueError):
    """An argument violates a documented precondition."""


class TableError(NsdiError):
    """Problem in a tabulated cross-section file; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(TableError):
    """Malformed table content: non-numeric field, bad header, or bad directive."""


class OrderingError(TableError):
    """Photon energies in a table are not strictly increasing."""


class DomainError(TableError):
    """A value lies outside its physical domain (e.g. negative sigma)."""


class CoverageError(NsdiError):
    """A query lies above the tabulated photon-energy range."""


class InvalidModelError(NsdiError):
    """Atom-model invariants cannot be satisfied."""


class ConsistencyError(NsdiError):
    """Curve thresholds disagree with the stated binding energies."""


class WindowError(NsdiError):
    """Photon energy outside the open nonsequential window."""


class ConvergenceError(NsdiError):
    """Quadrature did not converge within the node cap."""


class StabilityError(NsdiError):
    """Time step too large, or norm drift beyond tolerance during propagation."""


class NonperturbativeWarning(UserWarning):
    """Ionized population too large for a clean lowest-order extraction."""
