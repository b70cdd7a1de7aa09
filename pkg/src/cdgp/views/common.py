"""Common views for cdgp."""

from collections.abc import Sequence

import numpy as np
from rich.table import Table

from cdgp.benchmarks import CellResult, aggregate
from cdgp.constants import TrainMode
from cdgp.training import TrainResult


def _fmt(value: float | str | None, digits: int = 4) -> str:
    if value is None or value == "":
        return "-"
    if isinstance(value, str):
        return value
    if not np.isfinite(value):
        return "[red]nan[/red]"
    return f"{value:.{digits}g}"


def hyperparams_table(result: TrainResult, title: str | None = None) -> Table:
    """Generate a table of the learned parameters of every layer.

    Values are in the normalized units the model was trained in.

    Args:
        result: Trained model.
        title: Optional title. Defaults to the composition and the final LML.

    Returns:
        A `Table` with one row per layer, innermost first.
    """
    if not title:
        title = f"{result.spec} ({result.mode.value}), LML {result.lml:.6g}"

    table = Table(title=title, show_lines=True)
    table.add_column("Level", style="cyan")
    table.add_column("Kernel", style="cyan")
    table.add_column("Variance", style="magenta")
    table.add_column("Lengthscale", style="magenta")
    table.add_column("Noise variance", style="magenta")
    table.add_column("Stage LML", style="green")

    stage_lml = list(result.stage_lml) + [None] * (len(result.spec) - len(result.stage_lml))
    for n, (family, layer, noise) in enumerate(
        zip(result.spec.families, result.hyperparams.layers, result.hyperparams.noise),
        start=1,
    ):
        table.add_row(
            str(n),
            family.value,
            _fmt(layer.variance),
            _fmt(layer.lengthscale),
            _fmt(noise),
            _fmt(stage_lml[n - 1] if result.mode is TrainMode.SEQUENTIAL else None, 6),
        )
    return table


def metrics_table(results: Sequence[CellResult], title: str | None = None) -> Table | str:
    """Generate a table of median metrics per model and scenario, or a message when empty."""
    if not results:
        return "No benchmark results"

    table = Table(title=title or "Benchmark medians", show_lines=True)
    table.add_column("Model", style="cyan")
    table.add_column("Scenario", style="cyan")
    table.add_column("Status")
    table.add_column("MNLL", style="green")
    table.add_column("RMSE", style="magenta")
    table.add_column("Coverage", style="magenta")
    table.add_column("Wall time (s)")

    for model, scenario, _, status, mnll, rmse, coverage, wall_time in aggregate(results):
        table.add_row(
            model,
            scenario,
            status if status == "ok" else f"[yellow]{status}[/yellow]",
            _fmt(mnll),
            _fmt(rmse),
            _fmt(coverage, 3),
            _fmt(wall_time, 3),
        )
    return table
