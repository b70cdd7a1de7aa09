"""Benchmark functions, seeded scenarios and the benchmark sweep."""

from . import functions
from .scenarios import (
    COMPOSITIONAL_LOW,
    SCENARIOS,
    ScenarioSpec,
    gen_borehole,
    gen_branin,
    gen_compositional_variants,
    gen_denoising,
    gen_synthetic_a,
    gen_synthetic_b,
    get_scenario,
)
from .sweep import (
    AR1,
    METRICS_HEADER,
    VANILLA_GP,
    CellResult,
    SweepCell,
    aggregate,
    default_models,
    fit_model,
    run_cell,
    run_sweep,
    write_metrics,
)

__all__ = [
    "AR1",
    "COMPOSITIONAL_LOW",
    "METRICS_HEADER",
    "SCENARIOS",
    "VANILLA_GP",
    "CellResult",
    "ScenarioSpec",
    "SweepCell",
    "aggregate",
    "default_models",
    "fit_model",
    "functions",
    "gen_borehole",
    "gen_branin",
    "gen_compositional_variants",
    "gen_denoising",
    "gen_synthetic_a",
    "gen_synthetic_b",
    "get_scenario",
    "run_cell",
    "run_sweep",
    "write_metrics",
]
