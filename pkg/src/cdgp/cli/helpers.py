"""Helpers for the CLI."""

import shutil
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import typer
from confz import validate_all_configs
from loguru import logger
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from cdgp.constants import (
    CONFIG_PATH,
    EXIT_FAILURE,
    EXIT_USAGE,
    InitStrategy,
    OptimizerKind,
    TrainMode,
)
from cdgp.models import CompositionSpec
from cdgp.training import TrainConfig
from cdgp.utils import CdgpConfig, CdgpError, InputError, NumericalError, console

from .artifact import DatasetSource


def _print_validation_errors(error: ValidationError) -> None:
    for problem in error.errors():
        field = ".".join(str(p) for p in problem["loc"]) or "options"
        console.print(f"           [red]{field}: {problem['msg']}[/red]")


def instantiate_configuration() -> None:
    """Create the configuration file on first run and validate it."""
    # Create a default configuration file if one does not exist
    if not CONFIG_PATH.exists():
        CONFIG_PATH.parent.mkdir(parents=True, exist_ok=True)
        default_config_file = Path(__file__).parent.parent.resolve() / "default_config.toml"
        shutil.copy(default_config_file, CONFIG_PATH)
        logger.info(f"Created default configuration file: {CONFIG_PATH}")

    # Load and validate configuration
    try:
        validate_all_configs()
    except ValidationError as e:
        logger.error(f"Invalid configuration file: {CONFIG_PATH}")
        _print_validation_errors(e)
        raise typer.Exit(code=EXIT_USAGE) from e


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn library errors into logged messages and exit codes.

    Input and parse errors exit with 2. Numerical failures, model file problems and missing
    files exit with 1.
    """
    try:
        yield
    except InputError as e:
        logger.error(str(e))
        raise typer.Exit(code=EXIT_USAGE) from e
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        raise typer.Exit(code=EXIT_FAILURE) from e
    except CdgpError as e:
        logger.error(str(e))
        raise typer.Exit(code=EXIT_FAILURE) from e
    except OSError as e:
        logger.error(f"{e.strerror or e}: {e.filename}" if e.filename else str(e))
        raise typer.Exit(code=EXIT_FAILURE) from e


class RunConfig(BaseModel):
    """Validated options of a `train` or `sample` run.

    Flags left unset on the command line fall back to `CdgpConfig`.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    generator: str | None = None
    data: Path | None = None
    seed: int = 0
    low_noise: float | None = None
    spec: str
    mode: TrainMode = TrainMode.SEQUENTIAL
    optimizer: OptimizerKind
    max_iters: int
    restarts: int
    init_strategy: InitStrategy
    convergence_tol: float
    learning_rate: float
    learn_noise: bool = True
    normalize: bool
    workers: int
    init_variance: float
    init_lengthscale: float
    init_noise: float
    output_dir: Path

    @field_validator("spec")
    @classmethod
    def spec_must_parse(cls, value: str) -> str:
        """Normalize the composition string, rejecting invalid ones."""
        return str(CompositionSpec.parse(value))

    @field_validator("seed")
    @classmethod
    def seed_must_be_non_negative(cls, value: int) -> int:
        """Reject negative seeds."""
        if value < 0:
            msg = "must be non-negative"
            raise ValueError(msg)
        return value

    @model_validator(mode="after")
    def flags_must_agree(self) -> "RunConfig":
        """Reject conflicting flags before any computation starts."""
        if self.generator is not None and self.data is not None:
            msg = "--generator and --data are mutually exclusive"
            raise ValueError(msg)
        if self.generator is None and self.data is None:
            msg = "one of --generator or --data is required"
            raise ValueError(msg)
        if self.mode is TrainMode.JOINT and len(self.composition) != 2:  # noqa: PLR2004
            msg = f"joint training supports depth-2 compositions only, got {self.spec}"
            raise ValueError(msg)
        if self.low_noise is not None and self.generator is None:
            msg = "--low-noise only applies to generated data"
            raise ValueError(msg)
        return self

    @property
    def composition(self) -> CompositionSpec:
        """The parsed composition."""
        return CompositionSpec.parse(self.spec)

    @property
    def source(self) -> DatasetSource:
        """Where the dataset comes from."""
        if self.generator is not None:
            return DatasetSource(generator=self.generator, seed=self.seed, low_noise=self.low_noise)
        return DatasetSource(path=str(self.data))

    def train_config(self) -> TrainConfig:
        """Training settings of this run."""
        return TrainConfig(
            mode=self.mode,
            optimizer=self.optimizer,
            max_iters=self.max_iters,
            restarts=self.restarts,
            init_strategy=self.init_strategy,
            convergence_tol=self.convergence_tol,
            seed=self.seed,
            learning_rate=self.learning_rate,
            learn_noise=self.learn_noise,
            normalize=self.normalize,
            workers=self.workers,
            init_variance=self.init_variance,
            init_lengthscale=self.init_lengthscale,
            init_noise=self.init_noise,
        )


CONFIG_DEFAULTS = (
    "optimizer",
    "max_iters",
    "restarts",
    "init_strategy",
    "convergence_tol",
    "learning_rate",
    "normalize",
    "workers",
    "init_variance",
    "init_lengthscale",
    "init_noise",
    "output_dir",
)


def build_run_config(**flags: Any) -> RunConfig:  # noqa: ANN401
    """Merge command-line flags over the configuration and validate the result.

    Flags that are None take their value from `CdgpConfig`; `spec` falls back to
    `default_spec`.

    Raises:
        typer.Exit: With code 2 when the options are invalid or conflict.
    """
    config = CdgpConfig()
    values = {k: v for k, v in flags.items() if v is not None}
    for name in CONFIG_DEFAULTS:
        values.setdefault(name, getattr(config, name))
    values.setdefault("spec", config.default_spec)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        logger.error("Invalid options")
        _print_validation_errors(e)
        raise typer.Exit(code=EXIT_USAGE) from e


def output_path(path: Path | None, default_name: str) -> Path:
    """Return `path`, or `default_name` inside the configured output directory."""
    return path if path is not None else CdgpConfig().output_dir / default_name


def train_config_from_settings(**flags: Any) -> TrainConfig:  # noqa: ANN401
    """Training settings from `CdgpConfig`, overridden by the flags that are not None.

    Raises:
        typer.Exit: With code 2 when the settings are invalid.
    """
    config = CdgpConfig()
    values = {name: getattr(config, name) for name in CONFIG_DEFAULTS if name != "output_dir"}
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return TrainConfig(**values)
    except InputError as e:
        logger.error(f"Invalid options: {e}")
        raise typer.Exit(code=EXIT_USAGE) from e
