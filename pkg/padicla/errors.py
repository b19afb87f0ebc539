# padicla/errors.py

from typing import Any, Dict, Optional


class PadicError(Exception):
    """Base class for every domain failure raised by padicla.

    Each subclass maps to a process exit code used by the CLI.
    """

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = dict(details or {})

    def to_record(self) -> Dict[str, Any]:
        """Machine-readable failure record (written as JSON on stderr)."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": {k: str(v) for k, v in sorted(self.details.items())},
        }


class InsufficientPrecision(PadicError):
    exit_code = 3


class CapExhausted(PadicError):
    exit_code = 3


class BudgetExceeded(PadicError):
    exit_code = 3


class TailUnbounded(PadicError):
    exit_code = 3


class SolveStalled(PadicError):
    exit_code = 3


class NotInvertible(PadicError):
    exit_code = 1


class GainTooSmall(PadicError):
    exit_code = 1


class PropertyFailure(PadicError):
    """An experiment's asserted property did not hold."""

    exit_code = 1


class DomainError(PadicError):
    exit_code = 2


class Unsupported(PadicError):
    exit_code = 2


class ParseError(PadicError):
    exit_code = 2

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(message, {"position": position, "text": text})
        self.position = position
        self.text = text

    def __str__(self) -> str:
        return f"{self.message} at position {self.position}"


class UsageError(PadicError):
    """A command-line request that parsed but cannot be served."""

    exit_code = 2
