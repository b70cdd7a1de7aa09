"""Instantiate CdgpConfig class and set default values."""

from pathlib import Path
from typing import ClassVar

from confz import BaseConfig, ConfigSources, EnvSource, FileSource
from pydantic import field_validator

from cdgp.constants import CONFIG_PATH, InitStrategy, OptimizerKind


class CdgpConfig(BaseConfig):  # type: ignore [misc]
    """cdgp configuration.

    Values act as defaults for CLI flags; a flag given on the command line always wins.
    """

    output_dir: Path = Path()
    default_spec: str = "SE[SE]"
    optimizer: OptimizerKind = OptimizerKind.QUASI_NEWTON
    max_iters: int = 200
    restarts: int = 5
    init_strategy: InitStrategy = InitStrategy.LOG_UNIFORM_RANDOM
    convergence_tol: float = 1e-5
    learning_rate: float = 0.1
    normalize: bool = True
    init_variance: float = 1.0
    init_lengthscale: float = 1.0
    init_noise: float = 1e-2
    workers: int = 1
    benchmark_seeds: int = 5
    test_points: int = 200
    low_fidelity_noise: float = 0.1
    record_wall_time: bool = True

    CONFIG_SOURCES: ClassVar[ConfigSources | None] = [
        FileSource(file=CONFIG_PATH, optional=True),
        EnvSource(allow=["output_dir"], prefix="CDGP_"),
    ]

    @field_validator("max_iters", "restarts", "workers", "benchmark_seeds", "test_points")
    @classmethod
    def counts_must_be_positive(cls, value: int) -> int:
        """Reject zero or negative counts."""
        if value < 1:
            msg = "must be at least 1"
            raise ValueError(msg)
        return value

    @field_validator(
        "convergence_tol", "learning_rate", "init_variance", "init_lengthscale", "init_noise"
    )
    @classmethod
    def must_be_positive(cls, value: float) -> float:
        """Reject non-positive tolerances, step sizes and initial values."""
        if value <= 0:
            msg = "must be strictly positive"
            raise ValueError(msg)
        return value

    @field_validator("low_fidelity_noise")
    @classmethod
    def noise_must_be_non_negative(cls, value: float) -> float:
        """Reject negative noise levels."""
        if value < 0:
            msg = "must be non-negative"
            raise ValueError(msg)
        return value
