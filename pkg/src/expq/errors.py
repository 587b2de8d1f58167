"""Exceptions raised by the solver."""

from __future__ import annotations


class ExpqError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(ExpqError):
    """A precondition or internal invariant was violated."""


class ParseError(ExpqError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ResourceExceeded(ExpqError):
    """A configured limit was hit.  ``trace`` holds the events recorded so far."""

    def __init__(self, message: str, limit: str = "", trace=None):
        super().__init__(message)
        self.limit = limit
        self.trace = list(trace or [])
