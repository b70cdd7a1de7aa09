"""cdgp CLI."""

import time
from pathlib import Path
from typing import Annotated, Optional

import numpy as np
import typer
from loguru import logger

from cdgp.benchmarks import AR1, VANILLA_GP, get_scenario, run_sweep, write_metrics
from cdgp.cli import (
    DatasetSource,
    ModelArtifact,
    build_run_config,
    handle_errors,
    instantiate_configuration,
    output_path,
    train_config_from_settings,
)
from cdgp.constants import APP_DIR, VERSION, InitStrategy, OptimizerKind, TrainMode
from cdgp.models import CompositionSpec, load_query_csv, save_csv
from cdgp.training import predict as predict_model
from cdgp.training import sample_effective_prior, train as train_model
from cdgp.utils import (
    CdgpConfig,
    InputError,
    console,
    format_float,
    instantiate_logger,
    rule,
    write_csv,
)
from cdgp.views import hyperparams_table, metrics_table

app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    rich_markup_mode="rich",
    context_settings={"help_option_names": ["-h", "--help"]},
)
typer.rich_utils.STYLE_HELPTEXT = ""

GeneratorOption = Annotated[
    Optional[str],
    typer.Option("--generator", "-g", help="Scenario id, e.g. synthetic-a", show_default=False),
]
DataOption = Annotated[
    Optional[Path],
    typer.Option(
        "--data",
        "-d",
        help="Dataset CSV with columns x_1..x_d,y,fidelity_level",
        dir_okay=False,
        show_default=False,
    ),
]
SeedOption = Annotated[
    int, typer.Option("--seed", help="Seed of the generated data and of restarts", min=0)
]
LowNoiseOption = Annotated[
    Optional[float],
    typer.Option(
        "--low-noise",
        help="Low-fidelity noise of '-noisy' compositional scenarios [default: from config]",
        show_default=False,
    ),
]
SpecOption = Annotated[
    Optional[str],
    typer.Option(
        "--spec",
        "-s",
        help="Kernel composition, outermost first, e.g. SC[SC[SE]] [default: from config]",
        show_default=False,
    ),
]
OptimizerOption = Annotated[
    Optional[OptimizerKind],
    typer.Option("--optimizer", help="[default: from config]", show_default=False),
]
MaxItersOption = Annotated[
    Optional[int],
    typer.Option(
        "--max-iters",
        help="Iterations per run [default: from config]",
        show_default=False,
    ),
]
RestartsOption = Annotated[
    Optional[int],
    typer.Option(
        "--restarts",
        help="Restarts per stage [default: from config]",
        show_default=False,
    ),
]
WorkersOption = Annotated[
    Optional[int],
    typer.Option("--workers", help="Threads [default: from config]", show_default=False),
]
GridMinOption = Annotated[float, typer.Option("--grid-min", help="Lower end of the grid")]
GridMaxOption = Annotated[float, typer.Option("--grid-max", help="Upper end of the grid")]


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        console.print(f"{__package__} version: {VERSION}")
        raise typer.Exit()


def _grid(points: int, lo: float, hi: float) -> np.ndarray:
    if points < 1:
        msg = f"grid needs at least one point, got {points}"
        raise InputError(msg)
    if not hi > lo:
        msg = f"grid upper end {hi} must exceed the lower end {lo}"
        raise InputError(msg)
    return np.linspace(lo, hi, points).reshape(-1, 1)


@app.callback()
def main(
    log_file: Annotated[
        Path,
        typer.Option(
            help="Path to log file",
            show_default=True,
            dir_okay=False,
            file_okay=True,
            exists=False,
        ),
    ] = Path(f"{APP_DIR}/cdgp.log"),
    log_to_file: Annotated[
        bool,
        typer.Option(
            "--log-to-file",
            help="Log to file",
            show_default=True,
        ),
    ] = False,
    verbosity: Annotated[
        int,
        typer.Option(
            "-v",
            "--verbose",
            show_default=True,
            help="""Set verbosity level(0=INFO, 1=DEBUG, 2=TRACE, 3=TRACE and library warnings)""",
            count=True,
        ),
    ] = 0,
    version: Annotated[  # noqa: ARG001
        Optional[bool],
        typer.Option(
            "--version",
            is_eager=True,
            callback=version_callback,
            help="Print version and exit",
        ),
    ] = None,
) -> None:
    """Multi-fidelity Gaussian process regression with conditional deep-GP effective kernels.

    \b
    Low-fidelity observations are fused into a closed-form, data-dependent kernel, and an exact
    GP with that kernel is trained on the sparse high-fidelity observations.

    [bold]Usage Examples:[/bold]

    [dim]Train SE[SE] on the first nonlinear scenario[/dim]
    cdgp train --generator synthetic-a --spec "SE[SE]" --seed 7

    [dim]Predict on a 200-point grid with the truth appended[/dim]
    cdgp predict --model model.json --grid 200 --truth

    [dim]Draw prior samples conditioned on the low fidelity[/dim]
    cdgp sample --generator compositional-identity --samples 5

    [dim]Compare models on the Borehole and Branin scenarios[/dim]
    cdgp benchmark -s borehole -s branin --seeds 5
    """  # noqa: D301
    # Instantiate Logging and the configuration file
    instantiate_logger(verbosity, log_file, log_to_file)
    instantiate_configuration()


@app.command()
def train(
    generator: GeneratorOption = None,
    data: DataOption = None,
    seed: SeedOption = 0,
    low_noise: LowNoiseOption = None,
    spec: SpecOption = None,
    mode: Annotated[
        TrainMode, typer.Option("--mode", help="Stage-by-stage or joint training")
    ] = TrainMode.SEQUENTIAL,
    optimizer: OptimizerOption = None,
    max_iters: MaxItersOption = None,
    restarts: RestartsOption = None,
    init_strategy: Annotated[
        Optional[InitStrategy],
        typer.Option("--init-strategy", help="[default: from config]", show_default=False),
    ] = None,
    tol: Annotated[
        Optional[float],
        typer.Option("--tol", help="Gradient tolerance [default: from config]", show_default=False),
    ] = None,
    learning_rate: Annotated[
        Optional[float],
        typer.Option(
            "--learning-rate",
            help="Gradient-descent step [default: from config]",
            show_default=False,
        ),
    ] = None,
    learn_noise: Annotated[
        bool,
        typer.Option(
            "--learn-noise/--fixed-noise",
            help="Learn noise variances or pin them at each level's declared noise",
        ),
    ] = True,
    normalize: Annotated[
        Optional[bool],
        typer.Option(
            "--normalize/--no-normalize",
            help="[default: from config]",
            show_default=False,
        ),
    ] = None,
    workers: WorkersOption = None,
    output: Annotated[
        Optional[Path],
        typer.Option(
            "--output",
            "-o",
            help="Model file [default: <output_dir>/model.json]",
            show_default=False,
        ),
    ] = None,
    metrics: Annotated[
        Optional[Path],
        typer.Option(
            "--metrics",
            help="Metrics CSV [default: <output_dir>/train_metrics.csv]",
            show_default=False,
        ),
    ] = None,
    save_data: Annotated[
        Optional[Path],
        typer.Option("--save-data", help="Also write the dataset as CSV", show_default=False),
    ] = None,
) -> None:
    """Train a layered model and write a model file and a metrics record."""
    run = build_run_config(
        generator=generator,
        data=data,
        seed=seed,
        low_noise=low_noise,
        spec=spec,
        mode=mode,
        optimizer=optimizer,
        max_iters=max_iters,
        restarts=restarts,
        init_strategy=init_strategy,
        convergence_tol=tol,
        learning_rate=learning_rate,
        learn_noise=learn_noise,
        normalize=normalize,
        workers=workers,
    )
    model_path = output or run.output_dir / "model.json"
    metrics_path = metrics or run.output_dir / "train_metrics.csv"

    with handle_errors():
        source = run.source
        dataset = source.load()
        if save_data:
            save_csv(dataset, save_data)
            logger.info(f"Wrote dataset: {save_data}")

        rule(f"Train {run.spec}")
        cfg = run.train_config()
        start = time.perf_counter()
        result = train_model(dataset, run.composition, cfg)
        elapsed = time.perf_counter() - start

        ModelArtifact.from_result(result, dataset, source, cfg).save(model_path)
        wall_time = elapsed if CdgpConfig().record_wall_time else ""
        write_csv(
            metrics_path,
            ("spec", "mode", "dataset", "lml", "trace_length", "wall_time"),
            [
                (
                    run.spec,
                    result.mode.value,
                    source.describe(),
                    result.lml,
                    len(result.trace),
                    wall_time,
                )
            ],
        )

    console.print(hyperparams_table(result))
    logger.success(f"Wrote model: {model_path}")
    logger.info(f"Wrote metrics: {metrics_path}")


@app.command()
def predict(
    model: Annotated[
        Path,
        typer.Option("--model", "-m", help="Model file written by train", dir_okay=False),
    ],
    data: Annotated[
        Optional[Path],
        typer.Option(
            "--data",
            "-d",
            help="Dataset CSV, when it moved since training",
            dir_okay=False,
            show_default=False,
        ),
    ] = None,
    query: Annotated[
        Optional[Path],
        typer.Option(
            "--query",
            "-q",
            help="Query CSV with columns x_1..x_d and an optional y truth column",
            dir_okay=False,
            show_default=False,
        ),
    ] = None,
    grid: Annotated[
        Optional[int],
        typer.Option(
            "--grid",
            help="Points of an even grid on scalar inputs [default: test_points]",
            show_default=False,
        ),
    ] = None,
    grid_min: GridMinOption = 0.0,
    grid_max: GridMaxOption = 1.0,
    truth: Annotated[
        bool,
        typer.Option("--truth", help="Append the generating function's values and their MNLL"),
    ] = False,
    output: Annotated[
        Optional[Path],
        typer.Option(
            "--output",
            "-o",
            help="Predictions CSV [default: <output_dir>/predictions.csv]",
            show_default=False,
        ),
    ] = None,
) -> None:
    """Predict the highest fidelity with a trained model."""
    if query is not None and grid is not None:
        logger.error("--query and --grid are mutually exclusive")
        raise typer.Exit(code=2)
    destination = output_path(output, "predictions.csv")

    with handle_errors():
        artifact = ModelArtifact.load(model)
        source = artifact.dataset.source if data is None else DatasetSource(path=str(data))
        dataset = source.load()
        artifact.check_data(dataset)
        result = artifact.to_result()

        y_true = None
        if query is not None:
            X, y_true = load_query_csv(query)
        else:
            if dataset.dim != 1:
                msg = f"--grid needs scalar inputs, the model has d={dataset.dim}; use --query"
                raise InputError(msg)
            X = _grid(CdgpConfig().test_points if grid is None else grid, grid_min, grid_max)
        if truth:
            if source.generator is None:
                msg = "--truth needs a generated dataset; give truth as a y column with --query"
                raise InputError(msg)
            y_true = get_scenario(source.generator, source.seed or 0, source.low_noise).truth(X)

        prediction = predict_model(result, dataset, X)

        names = ["x"] if X.shape[1] == 1 else [f"x_{i}" for i in range(1, X.shape[1] + 1)]
        header = [*names, "mean", "std"]
        columns = [X, prediction.mean[:, None], prediction.std[:, None]]
        footer = []
        if y_true is not None:
            header += ["truth", "nll"]
            columns += [y_true[:, None], prediction.neg_log_density(y_true)[:, None]]
            footer = [
                f"mnll={format_float(prediction.mnll(y_true))}",
                f"rmse={format_float(prediction.rmse(y_true))}",
                f"coverage={format_float(prediction.coverage(y_true))}",
            ]
        rows = [[float(v) for v in row] for row in np.hstack(columns)]
        write_csv(destination, header, rows, footer=footer)

    if footer:
        console.print("\n".join(footer))
    logger.success(f"Wrote {len(rows)} predictions: {destination}")


@app.command()
def sample(
    generator: GeneratorOption = None,
    data: DataOption = None,
    seed: SeedOption = 0,
    low_noise: LowNoiseOption = None,
    spec: SpecOption = None,
    samples: Annotated[int, typer.Option("--samples", "-n", help="Number of paths", min=0)] = 5,
    points: Annotated[
        Optional[int],
        typer.Option("--points", help="Grid points [default: test_points]", show_default=False),
    ] = None,
    grid_min: GridMinOption = 0.0,
    grid_max: GridMaxOption = 1.0,
    variance: Annotated[
        float, typer.Option("--variance", help="Outer kernel variance", min=0)
    ] = 1.0,
    lengthscale: Annotated[
        float, typer.Option("--lengthscale", help="Outer kernel lengthscale", min=0)
    ] = 1.0,
    output: Annotated[
        Optional[Path],
        typer.Option(
            "--output",
            "-o",
            help="Samples CSV [default: <output_dir>/samples.csv]",
            show_default=False,
        ),
    ] = None,
) -> None:
    """Sample paths from the prior of a two-layer model conditioned on the low fidelity."""
    run = build_run_config(
        generator=generator, data=data, seed=seed, low_noise=low_noise, spec=spec
    )
    destination = output or run.output_dir / "samples.csv"

    with handle_errors():
        dataset = run.source.load()
        if dataset.dim != 1:
            msg = f"sampling on a grid needs scalar inputs, the data has d={dataset.dim}"
            raise InputError(msg)
        header = ["x", *(f"sample_{i}" for i in range(1, samples + 1))]
        if samples == 0:
            write_csv(destination, header, [])
            logger.success(f"Wrote an empty sample table: {destination}")
            return

        X = _grid(CdgpConfig().test_points if points is None else points, grid_min, grid_max)
        paths = sample_effective_prior(
            dataset[0],
            run.composition,
            X,
            samples,
            seed,
            run.train_config(),
            variance=variance,
            lengthscale=lengthscale,
        )
        rows = [[float(x), *(float(v) for v in col)] for x, col in zip(X[:, 0], paths.T)]
        write_csv(destination, header, rows)

    logger.success(f"Wrote {samples} samples on {len(X)} points: {destination}")


@app.command()
def benchmark(
    scenarios: Annotated[
        Optional[list[str]],
        typer.Option(
            "--scenario",
            "-s",
            help="Scenario id; repeat for several",
            show_default=False,
        ),
    ] = None,
    models: Annotated[
        Optional[list[str]],
        typer.Option(
            "--model",
            "-m",
            help=f"Composition, {AR1} or {VANILLA_GP}; repeat for several [default: by depth]",
            show_default=False,
        ),
    ] = None,
    seeds: Annotated[
        Optional[int],
        typer.Option(
            "--seeds",
            help="Seeds per scenario [default: from config]",
            show_default=False,
        ),
    ] = None,
    first_seed: Annotated[int, typer.Option("--first-seed", help="First seed", min=0)] = 0,
    test_points: Annotated[
        Optional[int],
        typer.Option(
            "--test-points",
            help="Evaluation points [default: from config]",
            show_default=False,
        ),
    ] = None,
    low_noise: LowNoiseOption = None,
    optimizer: OptimizerOption = None,
    max_iters: MaxItersOption = None,
    restarts: RestartsOption = None,
    workers: WorkersOption = None,
    wall_time: Annotated[
        Optional[bool],
        typer.Option(
            "--wall-time/--no-wall-time",
            help="[default: from config]",
            show_default=False,
        ),
    ] = None,
    output: Annotated[
        Optional[Path],
        typer.Option(
            "--output",
            "-o",
            help="Metrics CSV [default: <output_dir>/benchmark.csv]",
            show_default=False,
        ),
    ] = None,
) -> None:
    """Compare models on scenarios over several seeds."""
    config = CdgpConfig()
    cfg = train_config_from_settings(
        optimizer=optimizer, max_iters=max_iters, restarts=restarts, workers=workers
    )
    destination = output_path(output, "benchmark.csv")

    with handle_errors():
        if not scenarios:
            msg = "give at least one --scenario"
            raise InputError(msg)
        for name in models or []:
            if name not in {AR1, VANILLA_GP}:
                CompositionSpec.parse(name)
        noise = config.low_fidelity_noise if low_noise is None else low_noise
        specs = [get_scenario(name, low_noise=noise) for name in scenarios]
        n_seeds = config.benchmark_seeds if seeds is None else seeds
        if n_seeds < 1:
            msg = f"--seeds must be at least 1, got {n_seeds}"
            raise InputError(msg)

        rule("Benchmark")
        results = run_sweep(
            specs,
            list(range(first_seed, first_seed + n_seeds)),
            cfg,
            models=models or None,
            test_points=test_points or config.test_points,
            record_wall_time=config.record_wall_time if wall_time is None else wall_time,
        )
        write_metrics(results, destination)

    console.print(metrics_table(results))
    failed = sum(not r.ok for r in results)
    if failed:
        logger.warning(f"{failed} of {len(results)} cells failed")
    logger.success(f"Wrote metrics: {destination}")


if __name__ == "__main__":
    app()
