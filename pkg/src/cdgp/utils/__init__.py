"""Shared utilities for cdgp."""

from .console import console  # isort:skip
from .logging import InterceptHandler, instantiate_logger  # isort:skip
from .config import CdgpConfig  # isort:skip
from .common_utils import fingerprint, format_float, rule, write_csv
from .errors import ArtifactError, CdgpError, InputError, NumericalError, ParseError

__all__ = [
    "ArtifactError",
    "CdgpConfig",
    "CdgpError",
    "InputError",
    "InterceptHandler",
    "NumericalError",
    "ParseError",
    "console",
    "fingerprint",
    "format_float",
    "instantiate_logger",
    "rule",
    "write_csv",
]
