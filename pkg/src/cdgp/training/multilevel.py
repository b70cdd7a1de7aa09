"""Recursive composition of stages for two and three fidelity levels.

Stage 1 is a GP on the lowest level. Each later stage is a GP whose kernel is marginalized over
the previous stage's posterior moments, evaluated once on the union of every downstream input
(the next levels' inputs followed by the query points).
"""

from collections.abc import Sequence

import numpy as np
from loguru import logger

from cdgp.constants import KernelFamily, TrainMode
from cdgp.models import (
    CompositionSpec,
    ConditionalMoments,
    FidelityDataset,
    FidelityLevel,
    Normalizer,
    Prediction,
)
from cdgp.utils import InputError

from .config import TrainConfig, TrainResult
from .hyperparams import Hyperparams, level_bounds
from .optimize import run_restarts, starting_points
from .stages import condition_stage, decode_stage, stage_objective


def prepare(
    data: FidelityDataset, spec: CompositionSpec, cfg: TrainConfig
) -> tuple[Normalizer, FidelityDataset]:
    """Validate `data` against `spec` and return the normalizer and the normalized data.

    Raises:
        InputError: If the level count differs from the composition depth, a level is empty, or
            an SC innermost layer meets multi-dimensional inputs.
    """
    if len(data) != len(spec):
        msg = f"composition {spec} has {len(spec)} layers but the data has {len(data)} levels"
        raise InputError(msg)
    data.check_levels(len(spec))
    if spec.inner is KernelFamily.SC and data.dim != 1:
        msg = f"an SC innermost layer needs scalar inputs, the data has d={data.dim}"
        raise InputError(msg)
    normalizer = Normalizer.fit(data) if cfg.normalize else Normalizer.identity(data)
    return normalizer, normalizer.apply(data)


def fixed_noise(level: FidelityLevel, cfg: TrainConfig) -> float | None:
    """Noise variance pinned for `level`, or None when it is learned."""
    return None if cfg.learn_noise else level.noise_std**2


def downstream_inputs(levels: Sequence[FidelityLevel], query: np.ndarray | None) -> np.ndarray:
    """Stack the inputs of every level above the first, then the query points."""
    blocks = [level.X for level in levels[1:]]
    if query is not None:
        blocks.append(query)
    return np.vstack(blocks)


def propagate(
    spec: CompositionSpec,
    hyperparams: Hyperparams,
    levels: Sequence[FidelityLevel],
    query: np.ndarray | None = None,
) -> tuple[Prediction, list[ConditionalMoments]]:
    """Condition every stage in turn and return the exposed stage's posterior at `query`.

    Args:
        spec: Kernel composition.
        hyperparams: Parameters of every stage.
        levels: Observations, lowest fidelity first, in the units `hyperparams` were fit in.
        query: Query coordinates in the same units. None predicts at no points, in which case
            the returned prediction only carries the exposed level's LML.

    Returns:
        tuple: The exposed stage's prediction and the moments handed from each stage to the
            next, innermost first.
    """
    layer, noise = hyperparams.level(0)
    downstream = downstream_inputs(levels, query)
    prediction, moments = condition_stage(spec.inner, layer, noise, levels[0], None, downstream)
    chain = [moments]
    for s in range(1, len(spec)):
        layer, noise = hyperparams.level(s)
        prediction, moments = condition_stage(spec.families[s], layer, noise, levels[s], moments)
        if s < len(spec) - 1:
            chain.append(moments)
    return prediction, chain


def exposed_lml(
    spec: CompositionSpec, hyperparams: Hyperparams, levels: Sequence[FidelityLevel]
) -> float:
    """LML of the highest level's observations under the layered model."""
    return propagate(spec, hyperparams, levels)[0].lml


def fit_stages(
    spec: CompositionSpec, levels: Sequence[FidelityLevel], cfg: TrainConfig
) -> tuple[Hyperparams, tuple[float, ...], tuple[float, ...]]:
    """Optimize each stage in turn, conditioning later stages on the fitted earlier ones.

    Returns:
        tuple: The hyperparameters, the trace of the last stage, and every stage's final LML.
    """
    downstream = downstream_inputs(levels, None)
    moments: ConditionalMoments | None = None
    layers, noises, stage_lml = [], [], []
    trace: tuple[float, ...] = ()

    for s, family in enumerate(spec.families):
        level = levels[s]
        pinned = fixed_noise(level, cfg)
        outcome = run_restarts(
            stage_objective(family, moments, level, pinned),
            starting_points(1, cfg, stream=s, learn_noise=pinned is None),
            level_bounds(pinned is None),
            cfg,
            stage=f"Stage {s + 1} ({family.value})",
        )
        layer, noise = decode_stage(outcome.theta, pinned)
        logger.debug(
            f"Stage {s + 1}: variance={layer.variance:.4g} lengthscale={layer.lengthscale:.4g} "
            f"noise={noise:.3g} LML={outcome.lml:.6f}"
        )
        layers.append(layer)
        noises.append(noise)
        stage_lml.append(outcome.lml)
        trace = outcome.trace
        if s < len(spec) - 1:
            _, moments = condition_stage(
                family, layer, noise, level, moments, downstream if s == 0 else None
            )

    return Hyperparams(tuple(layers), tuple(noises)), trace, tuple(stage_lml)


def train_layered(data: FidelityDataset, spec: CompositionSpec, cfg: TrainConfig) -> TrainResult:
    """Stage-by-stage training for any supported depth."""
    normalizer, normalized = prepare(data, spec, cfg)
    hyperparams, trace, stage_lml = fit_stages(spec, normalized.levels, cfg)
    lml = exposed_lml(spec, hyperparams, normalized.levels)
    logger.debug(f"Trained {spec} sequentially: LML {lml:.6f}")
    return TrainResult(
        spec=spec,
        mode=TrainMode.SEQUENTIAL,
        hyperparams=hyperparams,
        lml=lml,
        trace=trace,
        normalizer=normalizer,
        stage_lml=stage_lml,
    )


def train_multilevel(
    data: FidelityDataset, spec: CompositionSpec, cfg: TrainConfig
) -> TrainResult:
    """Train a three-level model one stage at a time.

    Stage 1 fits the lowest level and yields moments at the middle and top inputs. Stage 2 fits
    the middle level with its effective kernel and yields moments at the top inputs. Stage 3
    fits the top level on those moments.

    Raises:
        InputError: If the composition or the data do not have three levels, or joint mode is
            requested.
    """
    if len(spec) != 3 or len(data) != 3:  # noqa: PLR2004
        msg = f"three-level training needs depth 3 and three levels, got {spec} and {len(data)}"
        raise InputError(msg)
    if cfg.mode is TrainMode.JOINT:
        msg = "joint training supports two levels only; use sequential mode for three levels"
        raise InputError(msg)
    return train_layered(data, spec, cfg)
