"""
Exception hierarchy shared by every nmlab module.

All errors derive from NmlabError, itself a ValueError, so callers that only
care about "bad input" can keep catching ValueError.
"""

from typing import Optional


class NmlabError(ValueError):
    """Base class for all nmlab errors."""


class FormulaSyntaxError(NmlabError):
    """Raised when formula text does not match the grammar."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SignatureError(NmlabError):
    """Unknown connective or arity mismatch."""


class FileFormatError(NmlabError):
    """Raised by the line-oriented file loaders; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.line = line
        self.source = source
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{':'.join(where)}: {message}"
        super().__init__(message)


class NmatrixError(NmlabError):
    """Invalid Nmatrix: empty or partial cells, unknown values."""


class NotDeterministicError(NmlabError):
    """An operation that needs a (deterministic) matrix received an Nmatrix."""


class MachineError(NmlabError):
    """Invalid counter machine or illegal step."""


class ReductionError(NmlabError):
    """The machine cannot be compiled (reserved-name collision)."""


class MonadifyError(NmlabError):
    """The monadification cannot be built or its preconditions fail."""


class ResourceLimitError(NmlabError):
    """A configured cap was exceeded; the answer is unknown, not negative."""
