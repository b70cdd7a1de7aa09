# type: ignore
"""Test the benchmark sweep and its metrics file."""

import math

import numpy as np
import pytest

from cdgp.benchmarks import (
    AR1,
    METRICS_HEADER,
    VANILLA_GP,
    CellResult,
    aggregate,
    default_models,
    get_scenario,
    run_sweep,
    write_metrics,
)
from cdgp.training import TrainConfig
from cdgp.utils import InputError
from tests.helpers import read_table

CFG = TrainConfig(max_iters=40, restarts=1)


def test_default_models():
    """Verify the compared models follow the number of levels."""
    assert default_models(2) == ["SE[SE]", "SC[SE]", AR1, VANILLA_GP]
    assert default_models(3)[:2] == ["SE[SE[SE]]", "SC[SC[SE]]"]


def test_run_sweep_small():
    """Verify every cell runs in order and yields metrics."""
    scenario = get_scenario("synthetic-a")
    results = run_sweep(
        [scenario], [0, 1], CFG, models=["SE[SE]", VANILLA_GP], test_points=30
    )
    assert [(r.model, r.seed) for r in results] == [
        ("SE[SE]", 0),
        ("SE[SE]", 1),
        (VANILLA_GP, 0),
        (VANILLA_GP, 1),
    ]
    for result in results:
        assert result.ok
        assert result.scenario == "synthetic-a"
        assert 0.0 <= result.coverage <= 1.0
        assert math.isfinite(result.mnll)
        assert result.rmse >= 0
        assert result.wall_time is not None


def test_run_sweep_records_failures():
    """Verify a model that cannot run on a scenario becomes a failed cell."""
    results = run_sweep(
        [get_scenario("borehole")],
        [0],
        CFG,
        models=["SC[SC]"],
        test_points=10,
        record_wall_time=False,
    )
    (result,) = results
    assert result.status == "input-error"
    assert math.isnan(result.mnll)
    assert result.wall_time is None


@pytest.mark.parametrize(
    "error", [np.linalg.LinAlgError("Matrix is not positive definite"), ValueError("nan in input")]
)
def test_run_sweep_survives_linear_algebra_failures(mocker, error):
    """Verify raw numpy and scipy failures inside a cell are recorded and the sweep goes on."""
    fit = mocker.patch("cdgp.benchmarks.sweep.fit_model", side_effect=[error, mocker.DEFAULT])
    fit.return_value = mocker.MagicMock(
        mnll=lambda truth: 1.0, rmse=lambda truth: 0.5, coverage=lambda truth: 0.9
    )
    results = run_sweep([get_scenario("synthetic-a")], [0, 1], CFG, models=["SE[SE]"])
    assert [r.status for r in results] == ["numerical-error", "ok"]
    assert math.isnan(results[0].mnll)
    assert results[1].mnll == 1.0


@pytest.mark.parametrize(
    ("kwargs", "message"),
    [
        ({"scenarios": [], "seeds": [0]}, "no scenarios"),
        ({"scenarios": [get_scenario("synthetic-a")], "seeds": []}, "no seeds"),
        ({"scenarios": [get_scenario("synthetic-a")], "seeds": [0], "models": []}, "no models"),
    ],
)
def test_run_sweep_rejects_empty_lists(kwargs, message):
    """Verify there must be something to run."""
    with pytest.raises(InputError, match=message):
        run_sweep(cfg=CFG, **kwargs)


def test_aggregate_takes_medians_of_successes():
    """Verify medians skip failed seeds and the status counts them."""
    results = [
        CellResult("SE[SE]", "s", 0, "ok", 1.0, 0.1, 0.9, 2.0),
        CellResult("SE[SE]", "s", 1, "ok", 3.0, 0.3, 1.0, 4.0),
        CellResult("SE[SE]", "s", 2, "numerical-error"),
        CellResult("GP", "s", 0, "ok", 5.0, 0.5, 0.5, None),
    ]
    first, second = aggregate(results)
    assert first[:4] == ("SE[SE]", "s", "median", "2/3 ok")
    assert first[4:] == pytest.approx((2.0, 0.2, 0.95, 3.0))
    assert second == ("GP", "s", "median", "ok", 5.0, 0.5, 0.5, "")


def test_write_metrics(tmp_path):
    """Verify one row per cell followed by the median rows."""
    results = [
        CellResult("GP", "s", 0, "ok", 1.5, 0.25, 1.0, None),
        CellResult("GP", "s", 1, "input-error"),
    ]
    path = tmp_path / "metrics.csv"
    write_metrics(results, path)
    header, rows, footer = read_table(path)
    assert tuple(header) == METRICS_HEADER
    assert rows[0] == ["GP", "s", "0", "ok", "1.5", "0.25", "1.0", ""]
    assert rows[1] == ["GP", "s", "1", "input-error", "nan", "nan", "nan", ""]
    assert rows[2] == ["GP", "s", "median", "1/2 ok", "1.5", "0.25", "1.0", ""]
    assert footer == []


@pytest.mark.slow
@pytest.mark.parametrize(
    ("scenario", "models"),
    [("borehole", ["SE[SE]", "SC[SE]"]), ("branin", ["SC[SC[SE]]"])],
)
def test_layered_models_beat_a_single_fidelity_gp(scenario, models):
    """Verify median MNLL over five seeds is below a GP trained on the top level alone."""
    results = run_sweep(
        [get_scenario(scenario)], list(range(5)), TrainConfig(), models=[*models, VANILLA_GP]
    )
    medians = {row[0]: row[4] for row in aggregate(results)}
    for model in models:
        assert medians[model] < medians[VANILLA_GP], medians
