"""Building blocks shared by every training mode: one GP stage of a layered model."""

import numpy as np

from cdgp.constants import KernelFamily
from cdgp.models import (
    BaseKernel,
    ConditionalMoments,
    EffectiveKernel,
    FidelityLevel,
    Prediction,
    lml_and_gradient,
    posterior_predict,
)

from .hyperparams import LayerParams
from .optimize import Objective


def stage_kernel(
    family: KernelFamily, layer: LayerParams, moments: ConditionalMoments | None
) -> BaseKernel | EffectiveKernel:
    """Return the kernel of a stage.

    The innermost stage uses a base kernel on raw inputs; later stages marginalize their kernel
    over the previous stage's moments.
    """
    base = BaseKernel(family, layer.variance, layer.lengthscale)
    return base if moments is None else EffectiveKernel(base, moments)


def stage_inputs(level: FidelityLevel, moments: ConditionalMoments | None) -> np.ndarray:
    """Training inputs of a stage: coordinates, or the first positions of the moments."""
    return level.X if moments is None else np.arange(len(level))


def gram_with_gradients(
    kernel: BaseKernel | EffectiveKernel, inputs: np.ndarray
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Return the Gram matrix and its derivatives by log variance and log lengthscale."""
    if isinstance(kernel, EffectiveKernel):
        partials = kernel.partials(inputs)
        return partials.d_log_variance, [partials.d_log_variance, partials.d_log_lengthscale]
    K, d_lengthscale = kernel.gram_gradients(inputs)
    return K, [K, d_lengthscale]


def decode_stage(theta: np.ndarray, fixed_noise: float | None) -> tuple[LayerParams, float]:
    """Map a stage's log-space vector to layer parameters and a noise variance."""
    values = np.exp(np.asarray(theta, dtype=np.float64))
    noise = float(values[2]) if fixed_noise is None else fixed_noise
    return LayerParams(float(values[0]), float(values[1])), noise


def stage_objective(
    family: KernelFamily,
    moments: ConditionalMoments | None,
    level: FidelityLevel,
    fixed_noise: float | None,
) -> Objective:
    """LML of one level's observations as a function of the stage's log-space parameters.

    The vector is `[log variance, log lengthscale]`, followed by `log noise` when the noise is
    learned (`fixed_noise` is None).
    """
    inputs = stage_inputs(level, moments)
    eye = np.eye(len(level))

    def objective(theta: np.ndarray) -> tuple[float, np.ndarray]:
        layer, noise = decode_stage(theta, fixed_noise)
        K, dK = gram_with_gradients(stage_kernel(family, layer, moments), inputs)
        if fixed_noise is None:
            dK.append(noise * eye)
        return lml_and_gradient(K, dK, level.y, noise)

    return objective


def condition_stage(
    family: KernelFamily,
    layer: LayerParams,
    noise: float,
    level: FidelityLevel,
    moments: ConditionalMoments | None,
    downstream: np.ndarray | None = None,
) -> tuple[Prediction, ConditionalMoments]:
    """Condition a stage on its level and return its posterior at the downstream points.

    The innermost stage predicts at the coordinates `downstream`. Later stages predict at the
    positions of `moments` that follow the level's own observations.
    """
    kernel = stage_kernel(family, layer, moments)
    if moments is None:
        if downstream is None:
            downstream = np.zeros((0, level.X.shape[1]))
        return posterior_predict(kernel, level.X, level.y, noise, downstream)
    n = len(level)
    return posterior_predict(kernel, np.arange(n), level.y, noise, np.arange(n, len(moments)))
