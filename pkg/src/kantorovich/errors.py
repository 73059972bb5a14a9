"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class KantorovichError(Exception):
    """Base class for all package errors."""


class RejectedInputError(KantorovichError, ValueError):
    """An argument violates an operation's precondition."""


class DomainError(RejectedInputError):
    """A point lies outside the domain of a function or group."""


class ParseError(RejectedInputError):
    """Syntax error in an expression or interval, with its byte offset."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class QuadratureError(KantorovichError, ArithmeticError):
    """Adaptive quadrature hit its subdivision limit.

    ``estimate`` and ``achieved`` carry the best value found and its error estimate.
    """

    def __init__(self, message: str, estimate=None, achieved=None):
        self.estimate = estimate
        self.achieved = achieved
        super().__init__(message)


class TruncationError(KantorovichError, ArithmeticError):
    """A series or improper integral cannot be truncated with a certificate."""


class ModularOverflowError(KantorovichError, OverflowError):
    """phi(lambda*|g|) overflowed: lambda is outside the admissible range."""

    def __init__(self, lam: float, message: str | None = None):
        self.lam = lam
        super().__init__(message or f"modular overflow at lambda={lam!r}")


class AuditFailure(KantorovichError):
    """A kernel or inequality audit did not pass."""


class ConfigError(RejectedInputError):
    """Experiment configuration failed validation; ``path`` names the field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
