"""Exceptions raised by cdgp."""

from typing import Any


class CdgpError(Exception):
    """Base class for cdgp errors."""


class InputError(CdgpError, ValueError):
    """Invalid input shape, violated precondition, or invalid configuration."""


class ParseError(InputError):
    """A dataset file or composition string could not be parsed.

    Args:
        message: Description of the problem.
        line: 1-based line number of the offending row, when known.
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NumericalError(CdgpError, ArithmeticError):
    """A factorization or objective evaluation failed.

    Args:
        message: Description of the failure.
        diagnostics: Extra context such as matrix size, jitter tried, or a parameter snapshot.
    """

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None) -> None:
        self.diagnostics = diagnostics or {}
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        super().__init__(f"{message} ({details})" if details else message)


class ArtifactError(CdgpError):
    """A model file is missing, malformed, or does not match the data it is used with."""
