"""Exception hierarchy for the CDANs packages."""

from typing import List, Optional


class CdansError(Exception):
    """Root of every error raised deliberately by this project."""


class InvalidInput(CdansError, ValueError):
    """Input data or configuration violates a precondition."""


class InvalidGraph(InvalidInput):
    """A graph mutation or document would break a graph invariant."""


class ShapeError(CdansError, ValueError):
    """Array arguments have incompatible shapes."""


class DegenerateInput(CdansError):
    """Samples carry no information (constant columns, zero traces)."""


class SingularConditioning(CdansError):
    """The regression design of a partial-correlation test is singular."""


class NumericalError(CdansError):
    """A linear system or decomposition failed numerically."""


class InternalInvariantViolation(CdansError):
    """An internal bookkeeping invariant was broken (a bug, not bad data)."""


class UndefinedMetric(CdansError):
    """A metric quotient has an empty denominator."""


class ParseError(CdansError):
    """A file could not be parsed; carries the offending location if known."""

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[str] = None
    ) -> None:
        location = ""
        if row is not None or column is not None:
            location = f" (row {row}, column {column!r})"
        super().__init__(message + location)
        self.row = row
        self.column = column


class SchemaError(CdansError):
    """A file has a structurally invalid header or layout."""


class VersionError(CdansError):
    """A graph document declares an unsupported schema version."""


class PhaseError(CdansError):
    """A pipeline phase failed; keeps the phase name and the tests run so far."""

    def __init__(self, phase: str, cause: Exception, partial_log: Optional[List] = None) -> None:
        super().__init__(f"phase '{phase}' failed: {cause}")
        self.phase = phase
        self.cause = cause
        self.partial_log = list(partial_log or [])
