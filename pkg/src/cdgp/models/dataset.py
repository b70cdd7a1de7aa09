"""Multi-fidelity datasets and their CSV representation."""

import csv
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger

from cdgp.utils import InputError, ParseError, fingerprint, format_float, write_csv

from .kernel import as_inputs

METADATA = re.compile(r"^level=(\d+),label=(.*),noise_std=([^,]+)$")


@dataclass(frozen=True, eq=False)
class FidelityLevel:
    """Observations of one fidelity level.

    Attributes:
        X: Inputs, shape (n, d).
        y: Outputs, shape (n,).
        noise_std: Declared observation noise standard deviation.
        label: Free-form name of the level.
    """

    X: np.ndarray
    y: np.ndarray
    noise_std: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        """Coerce arrays and validate shapes."""
        X = as_inputs(self.X)
        y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            msg = f"level {self.label!r}: {X.shape[0]} inputs but {y.shape[0]} outputs"
            raise InputError(msg)
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            msg = f"level {self.label!r}: non-finite values"
            raise InputError(msg)
        if not self.noise_std >= 0:
            msg = f"level {self.label!r}: noise_std must be non-negative, got {self.noise_std}"
            raise InputError(msg)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "noise_std", float(self.noise_std))

    def __len__(self) -> int:
        """Number of observations."""
        return self.y.shape[0]

    def __eq__(self, other: object) -> bool:
        """Exact equality of values and metadata."""
        if not isinstance(other, FidelityLevel):
            return NotImplemented
        return (
            self.label == other.label
            and self.noise_std == other.noise_std
            and self.X.shape == other.X.shape
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None  # type: ignore [assignment]


@dataclass(frozen=True, eq=False)
class FidelityDataset:
    """Fidelity levels ordered from lowest to highest fidelity over a shared input space."""

    levels: tuple[FidelityLevel, ...]

    def __post_init__(self) -> None:
        """Validate that there is at least one level and a shared input dimension."""
        levels = tuple(self.levels)
        if not levels:
            msg = "a dataset needs at least one fidelity level"
            raise InputError(msg)
        dims = {level.X.shape[1] for level in levels if len(level)}
        if len(dims) > 1:
            msg = f"fidelity levels have different input dimensions: {sorted(dims)}"
            raise InputError(msg)
        dim = dims.pop() if dims else levels[0].X.shape[1]
        # Empty levels take the shared dimension so that they stack cleanly
        levels = tuple(
            level
            if len(level)
            else FidelityLevel(np.zeros((0, dim)), level.y, level.noise_std, level.label)
            for level in levels
        )
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        """Number of fidelity levels."""
        return len(self.levels)

    def __iter__(self) -> Iterator[FidelityLevel]:
        """Iterate from lowest to highest fidelity."""
        return iter(self.levels)

    def __getitem__(self, index: int) -> FidelityLevel:
        """Return the level at 0-based `index`."""
        return self.levels[index]

    def __eq__(self, other: object) -> bool:
        """Exact equality of every level."""
        if not isinstance(other, FidelityDataset):
            return NotImplemented
        return len(self) == len(other) and all(
            a == b for a, b in zip(self.levels, other.levels, strict=True)
        )

    __hash__ = None  # type: ignore [assignment]

    @property
    def dim(self) -> int:
        """Input dimension shared by all levels."""
        return self.levels[0].X.shape[1]

    @property
    def high(self) -> FidelityLevel:
        """The highest fidelity level."""
        return self.levels[-1]

    def fingerprint(self) -> str:
        """SHA-256 digest of every value and metadata field."""
        parts: list[np.ndarray | str | float] = []
        for level in self.levels:
            parts.extend([level.label, level.noise_std, level.X, level.y])
        return fingerprint(*parts)

    def check_levels(self, expected: int) -> None:
        """Raise if the dataset does not have `expected` levels or a level is empty."""
        if len(self) != expected:
            msg = f"expected {expected} fidelity levels, got {len(self)}"
            raise InputError(msg)
        for k, level in enumerate(self.levels, start=1):
            if not len(level):
                msg = f"fidelity level {k} ({level.label or 'unnamed'}) is empty"
                raise InputError(msg)


def _parse_float(cell: str, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        msg = f"column {column!r}: {cell!r} is not a number"
        raise ParseError(msg, line) from None
    if not np.isfinite(value):
        msg = f"column {column!r}: non-finite value {cell!r}"
        raise ParseError(msg, line)
    return value


def _parse_header(header: Sequence[str], line: int) -> int:
    names = [name.strip() for name in header]
    if len(names) < 3 or names[-2:] != ["y", "fidelity_level"]:  # noqa: PLR2004
        msg = "header must end with 'y,fidelity_level'"
        raise ParseError(msg, line)
    expected = [f"x_{i}" for i in range(1, len(names) - 1)]
    if names[:-2] != expected:
        msg = f"input columns must be named {','.join(expected)}"
        raise ParseError(msg, line)
    return len(expected)


def load_csv(path: Path) -> FidelityDataset:
    """Load a dataset written by `save_csv` or by hand.

    Lines starting with `#` before the header may carry level metadata as
    `level=<k>,label=<text>,noise_std=<float>`; other comment lines are ignored. Levels without
    metadata are labelled `level-<k>` with zero declared noise.

    Raises:
        InputError: If the file is missing or has no header.
        ParseError: On malformed rows, with the offending line number.
    """
    if not path.is_file():
        msg = f"dataset file not found: {path}"
        raise InputError(msg)

    metadata: dict[int, tuple[str, float]] = {}
    rows: dict[int, tuple[list[list[float]], list[float]]] = {}
    dim: int | None = None

    with path.open(newline="", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = raw.strip()
            if not text:
                continue
            if text.startswith("#"):
                if dim is None and (match := METADATA.match(text.lstrip("#").strip())):
                    level = int(match.group(1))
                    noise = _parse_float(match.group(3), number, "noise_std")
                    metadata[level] = (match.group(2), noise)
                continue

            cells = next(csv.reader([text]))
            if dim is None:
                dim = _parse_header(cells, number)
                continue
            if len(cells) != dim + 2:
                msg = f"expected {dim + 2} columns, got {len(cells)}"
                raise ParseError(msg, number)

            x = [_parse_float(cells[i], number, f"x_{i + 1}") for i in range(dim)]
            y = _parse_float(cells[dim], number, "y")
            level_cell = cells[dim + 1].strip()
            if not level_cell.isdigit() or int(level_cell) < 1:
                msg = f"fidelity_level must be a positive integer, got {level_cell!r}"
                raise ParseError(msg, number)
            xs, ys = rows.setdefault(int(level_cell), ([], []))
            xs.append(x)
            ys.append(y)

    if dim is None:
        msg = f"dataset file {path} is empty or has no header"
        raise InputError(msg)

    n_levels = max([*rows, *metadata]) if rows or metadata else 0
    if n_levels == 0:
        msg = f"dataset file {path} has no observations"
        raise InputError(msg)

    levels = []
    for k in range(1, n_levels + 1):
        xs, ys = rows.get(k, ([], []))
        label, noise = metadata.get(k, (f"level-{k}", 0.0))
        X = np.array(xs, dtype=np.float64).reshape(-1, dim)
        levels.append(FidelityLevel(X, np.array(ys, dtype=np.float64), noise, label))
    total = sum(len(level) for level in levels)
    logger.debug(f"Loaded {total} rows in {n_levels} levels from {path}")
    return FidelityDataset(tuple(levels))


def save_csv(dataset: FidelityDataset, path: Path) -> None:
    """Write `dataset` with shortest round-trip floats and level metadata comments."""
    comments = [
        f"level={k},label={level.label},noise_std={format_float(level.noise_std)}"
        for k, level in enumerate(dataset, start=1)
    ]
    header = [*(f"x_{i}" for i in range(1, dataset.dim + 1)), "y", "fidelity_level"]
    rows = [
        [*(float(v) for v in x), float(y), k]
        for k, level in enumerate(dataset, start=1)
        for x, y in zip(level.X, level.y, strict=True)
    ]
    write_csv(path, header, rows, comments=comments)
    logger.debug(f"Wrote {len(rows)} rows to {path}")


def load_query_csv(path: Path) -> tuple[np.ndarray, np.ndarray | None]:
    """Load query inputs with header `x_1,...,x_d` and an optional trailing `y` truth column.

    Raises:
        InputError: If the file is missing or has no header.
        ParseError: On a malformed header or row.
    """
    if not path.is_file():
        msg = f"query file not found: {path}"
        raise InputError(msg)

    header: list[str] | None = None
    xs: list[list[float]] = []
    ys: list[float] = []
    with path.open(newline="", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            cells = next(csv.reader([text]))
            if header is None:
                header = [cell.strip() for cell in cells]
                inputs = header[:-1] if header[-1:] == ["y"] else header
                if not inputs or inputs != [f"x_{i}" for i in range(1, len(inputs) + 1)]:
                    msg = "query header must be x_1,...,x_d with an optional y column"
                    raise ParseError(msg, number)
                continue
            if len(cells) != len(header):
                msg = f"expected {len(header)} columns, got {len(cells)}"
                raise ParseError(msg, number)
            values = [_parse_float(c, number, name) for c, name in zip(cells, header, strict=True)]
            if header[-1] == "y":
                xs.append(values[:-1])
                ys.append(values[-1])
            else:
                xs.append(values)

    if header is None:
        msg = f"query file {path} is empty or has no header"
        raise InputError(msg)
    dim = len(header) - (header[-1] == "y")
    X = np.array(xs, dtype=np.float64).reshape(-1, dim)
    return X, np.array(ys, dtype=np.float64) if header[-1] == "y" else None
