"""Logging setup for cdgp."""

import logging
import sys
from enum import Enum
from pathlib import Path

from loguru import logger

from .console import console


class LogLevel(Enum):
    """Console verbosity selected with repeated `-v` flags."""

    INFO = 0
    DEBUG = 1
    TRACE = 2


LEVEL_STYLES = {
    "TRACE": ("turquoise2", "· "),
    "DEBUG": ("cyan", "» "),
    "INFO": ("bold", ""),
    "SUCCESS": ("bold green", "✓ "),
    "WARNING": ("bold yellow", "! "),
    "ERROR": ("bold red", "✗ "),
    "CRITICAL": ("bold white on red", "‼ "),
}


def log_formatter(record: dict) -> str:
    """Render a loguru record as rich markup.

    DEBUG and TRACE records carry their origin so optimizer chatter can be traced back to the
    stage that produced it.
    """
    name = record["level"].name
    color, prefix = LEVEL_STYLES.get(name, ("cyan", f"{name: <8} | "))

    msg = f"[{color}]{prefix}{{message}}[/{color}]"
    if name in {"DEBUG", "TRACE"}:
        origin = f"[#c5c5c5]({record['name']}:{record['function']}:{record['line']})[/#c5c5c5]"
        return f"{msg} {origin}"
    return msg


def instantiate_logger(
    verbosity: int, log_file: Path, log_to_file: bool
) -> None:  # pragma: no cover
    """Configure loguru sinks for a CLI run.

    Args:
        verbosity: 0 for INFO, 1 for DEBUG, 2 for TRACE. Values above 2 keep TRACE and also
            forward stdlib logging (numpy/scipy warnings included) into loguru.
        log_file: Destination of the file sink.
        log_to_file: Whether to add the file sink.
    """
    level = LogLevel(min(verbosity, 2)).name

    logger.remove()
    logger.add(console.print, level=level, colorize=True, format=log_formatter)  # type: ignore [arg-type]
    if log_to_file:
        logger.add(
            log_file,
            level=level,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {message} ({name})",
            rotation="50 MB",
            retention=2,
            compression="zip",
        )

    if verbosity > 2:  # noqa: PLR2004
        logging.captureWarnings(True)
        logging.basicConfig(handlers=[InterceptHandler()], level=0, force=True)


class InterceptHandler(logging.Handler):  # pragma: no cover
    """Forward stdlib logging records to loguru, keeping the caller's frame."""

    @staticmethod
    def emit(record: logging.LogRecord) -> None:
        """Re-emit `record` through loguru at the matching level."""
        try:
            level: str | int = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        frame, depth = sys._getframe(6), 6  # noqa: SLF001
        while frame and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back  # type: ignore [assignment]
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())
