"""Common utility functions for cdgp."""

import csv
import hashlib
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from .console import console


def rule(msg: str) -> None:
    """Print a bold cyan horizontal rule headed by `msg` in upper case."""
    style = "bold cyan"
    console.print()
    console.rule(f"[{style}]── {msg.upper()}[/{style}]", align="left", style=style)


def format_float(value: float) -> str:
    """Return the shortest decimal string that round-trips to the same double."""
    return repr(float(value))


def fingerprint(*parts: np.ndarray | str | float) -> str:
    """Return a SHA-256 hex digest over arrays and scalars.

    Arrays are hashed by shape, dtype and raw bytes in C order, so equal values always produce
    equal digests regardless of memory layout.
    """
    digest = hashlib.sha256()
    for part in parts:
        if isinstance(part, np.ndarray):
            arr = np.ascontiguousarray(part, dtype=np.float64)
            digest.update(str(arr.shape).encode())
            digest.update(arr.tobytes())
        else:
            digest.update(repr(part).encode())
        digest.update(b"|")
    return digest.hexdigest()


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[str | float | int]],
    comments: Sequence[str] = (),
    footer: Sequence[str] = (),
) -> None:
    """Write a tidy CSV file.

    Floats are written with `format_float`, so files are byte-identical across runs with the
    same values. `comments` go above the header and `footer` below the rows, each prefixed
    with `# `.

    Args:
        path: Destination file. Parent directories are created.
        header: Column names.
        rows: Data rows.
        comments: Lines written before the header.
        footer: Lines written after the last row.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        for line in comments:
            handle.write(f"# {line}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format_float(v) if isinstance(v, float | np.floating) else v for v in row]
            )
        for line in footer:
            handle.write(f"# {line}\n")
