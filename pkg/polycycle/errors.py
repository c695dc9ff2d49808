"""
Polycycle Errors

Exception types raised by the symbolic and numeric layers.
The command line maps them onto exit codes.
"""

from typing import Optional


class PolycycleError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(PolycycleError, ValueError):
    """Mismatched variable spaces, unknown variables or missing assignments."""


class ArgumentError(PolycycleError, ValueError):
    """An operation was called outside its documented preconditions."""


class UnsupportedError(PolycycleError, ValueError):
    """The request is outside the range this package implements."""


class DomainError(PolycycleError, ValueError):
    """A numeric model was evaluated outside its valid domain."""

    def __init__(self, message: str, stage: Optional[int] = None):
        super().__init__(message)
        self.stage = stage


class InvariantViolation(PolycycleError, RuntimeError):
    """A property that must hold exactly was found to fail."""


class ConvergenceError(PolycycleError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message: str, residuals: Optional[list] = None):
        super().__init__(message)
        self.residuals = residuals or []


class PrecisionExhausted(PolycycleError, RuntimeError):
    """Cancellation consumed more precision than the configured budget."""
