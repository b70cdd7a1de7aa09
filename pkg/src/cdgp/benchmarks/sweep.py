"""Benchmark sweep over models, scenarios and seeds."""

import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from loguru import logger
from rich.progress import Progress

from cdgp.models import CompositionSpec, FidelityDataset, Prediction
from cdgp.training import TrainConfig, ar1_train_predict, predict, train, vanilla_gp
from cdgp.utils import CdgpError, InputError, console, write_csv

from .scenarios import ScenarioSpec

AR1 = "AR1"
VANILLA_GP = "GP"
METRICS_HEADER = ("model", "scenario", "seed", "status", "mnll", "rmse", "coverage", "wall_time")


def default_models(depth: int) -> list[str]:
    """Models compared on a scenario with `depth` fidelity levels."""
    if depth == 3:  # noqa: PLR2004
        return ["SE[SE[SE]]", "SC[SC[SE]]", AR1, VANILLA_GP]
    return ["SE[SE]", "SC[SE]", AR1, VANILLA_GP]


@dataclass(frozen=True)
class SweepCell:
    """One model trained on one realization of one scenario."""

    model: str
    scenario: ScenarioSpec
    seed: int


@dataclass(frozen=True)
class CellResult:
    """Metrics of a cell; metrics are NaN unless `status` is `ok`.

    Attributes:
        model: Model name: a composition, `AR1` or `GP`.
        scenario: Scenario id.
        seed: Seed of the scenario realization and of the restarts.
        status: `ok`, `input-error` or `numerical-error`.
        mnll: Mean negative log predictive density of the noise-free truth.
        rmse: Root mean squared error of the predictive mean.
        coverage: Fraction of truth values inside the central 95% band.
        wall_time: Seconds spent training and predicting, or None when not recorded.
    """

    model: str
    scenario: str
    seed: int
    status: str
    mnll: float = float("nan")
    rmse: float = float("nan")
    coverage: float = float("nan")
    wall_time: float | None = None

    @property
    def ok(self) -> bool:
        """Whether the cell produced metrics."""
        return self.status == "ok"


def fit_model(
    model: str, data: FidelityDataset, query: np.ndarray, cfg: TrainConfig
) -> Prediction:
    """Train `model` on `data` and predict the highest fidelity at `query`.

    The autoregressive model uses the two highest levels when the data has three.
    """
    if model == AR1:
        return ar1_train_predict(FidelityDataset(data.levels[-2:]), query, cfg)
    if model == VANILLA_GP:
        return vanilla_gp(data.high, query, cfg)
    spec = CompositionSpec.parse(model)
    return predict(train(data, spec, cfg), data, query)


def run_cell(
    cell: SweepCell, cfg: TrainConfig, test_points: int, record_wall_time: bool = True
) -> CellResult:
    """Run one cell; training and prediction failures become a failed result."""
    scenario = cell.scenario.with_seed(cell.seed)
    start = time.perf_counter()
    try:
        data = scenario.generate()
        query = scenario.test_inputs(test_points)
        prediction = fit_model(cell.model, data, query, replace(cfg, seed=cell.seed))
    except (CdgpError, np.linalg.LinAlgError, ValueError) as e:
        status = "input-error" if isinstance(e, InputError) else "numerical-error"
        logger.warning(f"{cell.model} on {scenario.name} (seed {cell.seed}) failed: {e}")
        return CellResult(cell.model, scenario.name, cell.seed, status)

    truth = scenario.truth(query)
    elapsed = time.perf_counter() - start
    result = CellResult(
        model=cell.model,
        scenario=scenario.name,
        seed=cell.seed,
        status="ok",
        mnll=prediction.mnll(truth),
        rmse=prediction.rmse(truth),
        coverage=prediction.coverage(truth),
        wall_time=elapsed if record_wall_time else None,
    )
    logger.debug(
        f"{cell.model} on {scenario.name} (seed {cell.seed}): MNLL {result.mnll:.4f} "
        f"RMSE {result.rmse:.4g} coverage {result.coverage:.3f}"
    )
    return result


def run_sweep(
    scenarios: Sequence[ScenarioSpec],
    seeds: Sequence[int],
    cfg: TrainConfig,
    models: Sequence[str] | None = None,
    test_points: int = 200,
    record_wall_time: bool = True,
) -> list[CellResult]:
    """Run every (model, scenario, seed) cell and return the results in submission order.

    Cells run on `cfg.workers` threads; restarts inside a cell then run one at a time.

    Args:
        scenarios: Scenarios to realize.
        seeds: Seeds of every scenario.
        cfg: Training settings shared by all models. Its seed is replaced by the cell's.
        models: Model names. Defaults to `default_models` for each scenario's depth.
        test_points: Evaluation points per scenario.
        record_wall_time: Whether to time the cells.

    Raises:
        InputError: If there is no scenario, seed or model to run.
    """
    if not scenarios:
        msg = "no scenarios to benchmark"
        raise InputError(msg)
    if not seeds:
        msg = "no seeds to benchmark"
        raise InputError(msg)
    if models is not None and not models:
        msg = "no models to benchmark"
        raise InputError(msg)

    cells = [
        SweepCell(model, scenario, seed)
        for scenario in scenarios
        for model in (models or default_models(len(scenario)))
        for seed in seeds
    ]
    cell_cfg = replace(cfg, workers=1)
    results = []
    with Progress(console=console, transient=True) as progress:
        task = progress.add_task("Benchmark", total=len(cells))
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [
                pool.submit(run_cell, cell, cell_cfg, test_points, record_wall_time)
                for cell in cells
            ]
            for future in futures:
                results.append(future.result())
                progress.advance(task)
    return results


def _median(values: Sequence[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    return float(np.median(present)) if present else None


def aggregate(results: Sequence[CellResult]) -> list[tuple]:
    """Median metrics over the successful seeds of every (model, scenario) pair.

    The status is `ok` when every seed succeeded and `<ok>/<total> ok` otherwise.
    """
    groups: dict[tuple[str, str], list[CellResult]] = {}
    for result in results:
        groups.setdefault((result.model, result.scenario), []).append(result)

    rows = []
    for (model, scenario), group in groups.items():
        ok = [r for r in group if r.ok]
        status = "ok" if len(ok) == len(group) else f"{len(ok)}/{len(group)} ok"
        medians = [
            _median([getattr(r, metric) for r in ok]) if ok else float("nan")
            for metric in ("mnll", "rmse", "coverage")
        ]
        wall_time = _median([r.wall_time for r in ok])
        rows.append(
            (model, scenario, "median", status, *medians, "" if wall_time is None else wall_time)
        )
    return rows


def write_metrics(results: Sequence[CellResult], path: Path) -> None:
    """Write one row per cell followed by the median rows."""
    rows = [
        (
            r.model,
            r.scenario,
            r.seed,
            r.status,
            r.mnll,
            r.rmse,
            r.coverage,
            "" if r.wall_time is None else r.wall_time,
        )
        for r in results
    ]
    write_csv(path, METRICS_HEADER, [*rows, *aggregate(results)])
