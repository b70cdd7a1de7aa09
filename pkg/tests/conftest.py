# type: ignore
"""Shared fixtures for tests."""

from pathlib import Path

import numpy as np
import pytest
from confz import DataSource, FileSource

from cdgp.models import FidelityDataset, FidelityLevel
from cdgp.training import TrainConfig
from cdgp.utils import console

FIXTURE_CONFIG = Path(__file__).resolve().parent / "fixtures/fixture_config.toml"
FIXTURE_DATASET = Path(__file__).resolve().parent / "fixtures/two_level.csv"


@pytest.fixture(autouse=True)
def _isolated_config_file(tmp_path, mocker):
    """Keep the CLI from writing a configuration file into the user's app directory."""
    mocker.patch("cdgp.cli.helpers.CONFIG_PATH", tmp_path / "config" / "config.toml")


@pytest.fixture()
def debug():
    """Print debug information to the console. This is used to debug tests while writing them."""

    def _debug_inner(label: str, value: str | Path, breakpoint: bool = False):
        """Print debug information to the console. This is used to debug tests while writing them.

        Args:
            label (str): The label to print above the debug information.
            value (str | Path): The value to print. When this is a path, prints all files in the path.
            breakpoint (bool, optional): Whether to break after printing. Defaults to False.

        Returns:
            bool: Whether to break after printing.
        """
        console.rule(label)
        if not isinstance(value, Path) or not value.is_dir():
            console.print(value)
        else:
            for p in value.rglob("*"):
                console.print(p)

        console.rule()

        if breakpoint:
            return pytest.fail("Breakpoint")

        return True

    return _debug_inner


@pytest.fixture()
def mock_config():
    """Mock specific configuration data for use in tests."""

    def _inner(
        output_dir: Path | None = None,
        default_spec: str | None = None,
        max_iters: int | None = None,
        restarts: int | None = None,
        record_wall_time: bool | None = None,
    ):
        override_data = {}
        if output_dir:
            override_data["output_dir"] = str(output_dir)
        if default_spec:
            override_data["default_spec"] = default_spec
        if max_iters:
            override_data["max_iters"] = max_iters
        if restarts:
            override_data["restarts"] = restarts
        if record_wall_time is not None:
            override_data["record_wall_time"] = record_wall_time

        return [FileSource(FIXTURE_CONFIG), DataSource(data=override_data)]

    return _inner


@pytest.fixture()
def fast_cfg():
    """Training settings small enough for unit tests."""
    return TrainConfig(max_iters=100, restarts=2)


@pytest.fixture()
def noisy_pair():
    """Two noisy levels of related smooth functions on [0, 1]."""

    def _inner(seed: int = 0, n_low: int = 10, n_high: int = 6, noise: float = 0.05):
        rng = np.random.default_rng(seed)
        x_low = rng.uniform(0, 1, n_low)
        x_high = rng.uniform(0, 1, n_high)
        y_low = np.sin(2 * np.pi * x_low) + noise * rng.standard_normal(n_low)
        y_high = 2 * np.sin(2 * np.pi * x_high) + x_high + noise * rng.standard_normal(n_high)
        return FidelityDataset(
            (
                FidelityLevel(x_low, y_low, noise, "low"),
                FidelityLevel(x_high, y_high, noise, "high"),
            )
        )

    return _inner
