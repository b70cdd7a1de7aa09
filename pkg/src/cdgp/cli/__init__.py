"""CLI helpers."""

from .artifact import DatasetSource, ModelArtifact
from .helpers import (
    RunConfig,
    build_run_config,
    handle_errors,
    instantiate_configuration,
    output_path,
    train_config_from_settings,
)

__all__ = [
    "DatasetSource",
    "ModelArtifact",
    "RunConfig",
    "build_run_config",
    "handle_errors",
    "instantiate_configuration",
    "output_path",
    "train_config_from_settings",
]
