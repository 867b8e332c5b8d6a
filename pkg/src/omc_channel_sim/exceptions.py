from typing import Any, Dict, Optional


class OmcSimError(Exception):
    """
    Base class for all errors raised by omc-channel-sim.

    Attributes:
        exit_code (int): Process exit code used by the command line front end.
    """

    exit_code: int = 3


class DomainError(OmcSimError, ValueError):
    """Raised when an input violates the documented precondition of an operation."""


class SingularPointError(DomainError):
    """Raised when a closed-form field is evaluated at its singular point (r = 0)."""


class UndefinedCorrelationError(DomainError):
    """Raised when a correlation is requested for a trace without variance."""


class AlignmentError(DomainError):
    """Raised when two traces do not share a grid or cannot be aligned."""


class NumericalError(OmcSimError):
    """
    Raised when a numerical routine fails to reach its tolerance.

    Attributes:
        diagnostics (Dict[str, Any]): Details reported by the failing routine.
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TraceParseError(OmcSimError):
    """
    Raised when a trace file cannot be parsed.

    Attributes:
        line_number (Optional[int]): One-based line number of the offending line.
    """

    exit_code = 2

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConfigError(OmcSimError):
    """
    Raised when a scenario configuration fails validation.

    Attributes:
        field_path (str): Dotted path of the first invalid field.
    """

    exit_code = 2

    def __init__(self, message: str, field_path: str = ""):
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)
        self.field_path = field_path
