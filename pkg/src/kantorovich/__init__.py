"""Kantorovich-type sampling, convolution and Mellin operators with Orlicz-space diagnostics."""

from .errors import (AuditFailure, ConfigError, DomainError, KantorovichError,
                     ModularOverflowError, ParseError, QuadratureError, RejectedInputError,
                     TruncationError)

__version__ = "0.1.0"

__all__ = [
    "AuditFailure", "ConfigError", "DomainError", "KantorovichError", "ModularOverflowError",
    "ParseError", "QuadratureError", "RejectedInputError", "TruncationError", "__version__",
]
