# type: ignore
"""Test cdgp CLI."""

import json

import numpy as np
import pytest
from typer.testing import CliRunner

from cdgp.cdgp import app
from cdgp.cli import ModelArtifact
from cdgp.constants import VERSION
from cdgp.models import load_csv
from cdgp.training import predict
from cdgp.utils import CdgpConfig
from tests.conftest import FIXTURE_DATASET
from tests.helpers import read_table, strip_ansi

runner = CliRunner()


def _invoke(mock_config, output_dir, args):
    with CdgpConfig.change_config_sources(mock_config(output_dir=output_dir)):
        return runner.invoke(app, args)


def test_version():
    """Test printing version and then exiting."""
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert f"cdgp version: {VERSION}" in strip_ansi(result.output)


def test_train_writes_model_and_metrics(mock_config, tmp_path):
    """Verify train writes a model file and a metrics row, identical across reruns."""
    outputs = []
    for run in ("first", "second"):
        result = _invoke(
            mock_config, tmp_path / run, ["train", "--generator", "synthetic-a", "--seed", "3"]
        )
        assert result.exit_code == 0, result.output
        outputs.append(tmp_path / run)

    first, second = outputs
    for name in ("model.json", "train_metrics.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()

    header, rows, _ = read_table(first / "train_metrics.csv")
    assert header == ["spec", "mode", "dataset", "lml", "trace_length", "wall_time"]
    assert rows[0][:3] == ["SE[SE]", "sequential", "synthetic-a (seed 3)"]
    assert rows[0][-1] == ""

    artifact = ModelArtifact.load(first / "model.json")
    assert artifact.spec == "SE[SE]"
    assert artifact.training.max_iters == 50


def test_train_from_file_with_options(mock_config, tmp_path):
    """Verify training on a CSV file with explicit flags and saving generated data."""
    result = _invoke(
        mock_config,
        tmp_path,
        ["train", "--data", str(FIXTURE_DATASET), "--spec", "sc[se]", "--mode", "joint"],
    )
    assert result.exit_code == 0, result.output
    artifact = ModelArtifact.load(tmp_path / "model.json")
    assert artifact.spec == "SC[SE]"
    assert artifact.mode.value == "joint"
    assert artifact.dataset.source.path == str(FIXTURE_DATASET)

    saved = tmp_path / "data.csv"
    result = _invoke(
        mock_config,
        tmp_path,
        [
            "train",
            "-g",
            "branin",
            "--spec",
            "SE[SE[SE]]",
            "--max-iters",
            "10",
            "--restarts",
            "1",
            "--save-data",
            str(saved),
        ],
    )
    assert result.exit_code == 0, result.output
    assert len(load_csv(saved)) == 3


@pytest.mark.parametrize(
    "args",
    [
        ["train", "--generator", "synthetic-a", "--spec", "SE[XX]"],
        ["train", "--generator", "synthetic-a", "--data", str(FIXTURE_DATASET)],
        ["train"],
        ["train", "--generator", "branin", "--spec", "SE[SE[SE]]", "--mode", "joint"],
        ["train", "--generator", "no-such-scenario"],
        ["train", "--generator", "synthetic-a", "--spec", "SE[SE[SE]]"],
    ],
)
def test_train_usage_errors(mock_config, tmp_path, args):
    """Verify invalid or conflicting options exit with code 2 before writing anything."""
    result = _invoke(mock_config, tmp_path, args)
    assert result.exit_code == 2
    assert not (tmp_path / "model.json").exists()


def test_predict_on_grid_with_truth(mock_config, tmp_path):
    """Verify grid predictions and a footer that matches the library metrics."""
    assert _invoke(mock_config, tmp_path, ["train", "-g", "synthetic-a"]).exit_code == 0
    result = _invoke(
        mock_config,
        tmp_path,
        ["predict", "--model", str(tmp_path / "model.json"), "--grid", "200", "--truth"],
    )
    assert result.exit_code == 0, result.output

    header, rows, footer = read_table(tmp_path / "predictions.csv")
    assert header == ["x", "mean", "std", "truth", "nll"]
    assert len(rows) == 200
    assert float(rows[0][0]) == 0.0
    assert float(rows[-1][0]) == 1.0
    metrics = dict(line.split("=") for line in footer)
    assert set(metrics) == {"mnll", "rmse", "coverage"}

    artifact = ModelArtifact.load(tmp_path / "model.json")
    data = artifact.dataset.source.load()
    X = np.array([float(row[0]) for row in rows])
    truth = np.array([float(row[3]) for row in rows])
    expected = predict(artifact.to_result(), data, X).mnll(truth)
    assert float(metrics["mnll"]) == pytest.approx(expected, rel=1e-12)


def test_predict_from_query_file(mock_config, tmp_path):
    """Verify query files with a truth column, for a model trained on a CSV file."""
    args = ["train", "--data", str(FIXTURE_DATASET)]
    assert _invoke(mock_config, tmp_path, args).exit_code == 0
    query = tmp_path / "query.csv"
    query.write_text("x_1,y\n0.25,2.0\n0.75,-2.0\n")
    output = tmp_path / "out" / "query_predictions.csv"
    result = _invoke(
        mock_config,
        tmp_path,
        ["predict", "-m", str(tmp_path / "model.json"), "-q", str(query), "-o", str(output)],
    )
    assert result.exit_code == 0, result.output
    header, rows, footer = read_table(output)
    assert header == ["x", "mean", "std", "truth", "nll"]
    assert len(rows) == 2
    assert len(footer) == 3


@pytest.mark.parametrize(
    ("extra", "exit_code"),
    [
        (["--grid", "10", "--query", "q.csv"], 2),
        (["--data", str(FIXTURE_DATASET)], 1),
        (["--grid", "0"], 2),
    ],
)
def test_predict_errors(mock_config, tmp_path, extra, exit_code):
    """Verify conflicting flags, mismatched data and empty grids."""
    assert _invoke(mock_config, tmp_path, ["train", "-g", "synthetic-a"]).exit_code == 0
    args = ["predict", "--model", str(tmp_path / "model.json"), *extra]
    assert _invoke(mock_config, tmp_path, args).exit_code == exit_code


def test_predict_missing_model(mock_config, tmp_path):
    """Verify a missing model file exits with code 1."""
    args = ["predict", "--model", str(tmp_path / "nope.json")]
    assert _invoke(mock_config, tmp_path, args).exit_code == 1


def test_predict_invalid_model_parameters(mock_config, tmp_path):
    """Verify a model file with a negative variance exits with code 1."""
    assert _invoke(mock_config, tmp_path, ["train", "-g", "synthetic-a"]).exit_code == 0
    path = tmp_path / "model.json"
    content = json.loads(path.read_text())
    content["layers"][1]["variance"] = -1.0
    path.write_text(json.dumps(content))
    result = _invoke(mock_config, tmp_path, ["predict", "--model", str(path)])
    assert result.exit_code == 1


def test_sample(mock_config, tmp_path):
    """Verify sample paths on a grid and the header-only output for zero samples."""
    args = ["sample", "-g", "compositional-identity", "-n", "3", "--points", "20"]
    result = _invoke(mock_config, tmp_path, args)
    assert result.exit_code == 0, result.output
    header, rows, _ = read_table(tmp_path / "samples.csv")
    assert header == ["x", "sample_1", "sample_2", "sample_3"]
    assert len(rows) == 20

    output = tmp_path / "empty.csv"
    args = ["sample", "-g", "compositional-identity", "-n", "0", "-o", str(output)]
    assert _invoke(mock_config, tmp_path, args).exit_code == 0
    header, rows, _ = read_table(output)
    assert header == ["x"]
    assert rows == []
    assert output.read_text() == "x\n"


def test_sample_needs_scalar_inputs(mock_config, tmp_path):
    """Verify sampling refuses multi-dimensional scenarios."""
    assert _invoke(mock_config, tmp_path, ["sample", "-g", "borehole"]).exit_code == 2


def test_benchmark(mock_config, tmp_path):
    """Verify a small sweep writes per-seed and median rows."""
    args = [
        "benchmark",
        "-s",
        "synthetic-a",
        "-m",
        "SE[SE]",
        "-m",
        "GP",
        "--seeds",
        "1",
        "--test-points",
        "20",
        "--max-iters",
        "20",
    ]
    result = _invoke(mock_config, tmp_path, args)
    assert result.exit_code == 0, result.output
    header, rows, _ = read_table(tmp_path / "benchmark.csv")
    assert header[:4] == ["model", "scenario", "seed", "status"]
    assert [row[:3] for row in rows] == [
        ["SE[SE]", "synthetic-a", "0"],
        ["GP", "synthetic-a", "0"],
        ["SE[SE]", "synthetic-a", "median"],
        ["GP", "synthetic-a", "median"],
    ]
    assert all(row[-1] == "" for row in rows)


@pytest.mark.parametrize(
    "args",
    [
        ["benchmark"],
        ["benchmark", "-s", "synthetic-a", "-m", "XX"],
        ["benchmark", "-s", "synthetic-z"],
        ["benchmark", "-s", "synthetic-a", "--seeds", "0"],
    ],
)
def test_benchmark_usage_errors(mock_config, tmp_path, args):
    """Verify missing scenarios and invalid names exit with code 2."""
    assert _invoke(mock_config, tmp_path, args).exit_code == 2
