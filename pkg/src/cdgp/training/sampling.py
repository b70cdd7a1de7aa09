"""Sample paths from the marginal prior of a two-layer model conditioned on low-fidelity data."""

import numpy as np
from loguru import logger

from cdgp.constants import KernelFamily
from cdgp.models import (
    BaseKernel,
    CompositionSpec,
    ConditionalMoments,
    EffectiveKernel,
    FidelityDataset,
    FidelityLevel,
    as_inputs,
    posterior_predict,
    sample_prior,
)
from cdgp.utils import InputError

from .baselines import vanilla_fit
from .config import TrainConfig


def low_fidelity_moments(
    level: FidelityLevel, family: KernelFamily, grid: np.ndarray, cfg: TrainConfig
) -> ConditionalMoments:
    """Fit a GP to the low-fidelity observations and return its posterior on `grid`.

    The moments are in the units of the observations, whatever scaling training used.
    """
    grid = as_inputs(grid)
    if family is KernelFamily.SC and grid.shape[1] != 1:
        msg = f"an SC innermost layer needs scalar inputs, got d={grid.shape[1]}"
        raise InputError(msg)
    fit = vanilla_fit(level, cfg, family)
    (scaled,) = fit.normalizer.apply(FidelityDataset((level,))).levels
    kernel = BaseKernel(family, fit.layer.variance, fit.layer.lengthscale)
    _, moments = posterior_predict(
        kernel, scaled.X, scaled.y, fit.noise, fit.normalizer.inputs(grid)
    )
    scale = fit.normalizer.y_scale[0]
    return ConditionalMoments(
        fit.normalizer.outputs(moments.mean, 0), scale**2 * moments.covariance
    )


def sample_effective_prior(
    level: FidelityLevel,
    spec: CompositionSpec,
    grid: np.ndarray,
    n_samples: int,
    seed: int,
    cfg: TrainConfig,
    variance: float = 1.0,
    lengthscale: float = 1.0,
) -> np.ndarray:
    """Draw paths on `grid` from the prior whose kernel is marginalized over the low fidelity.

    Args:
        level: Low-fidelity observations.
        spec: Depth-2 composition; its inner family fits the low fidelity and its outer family
            is marginalized.
        grid: Inputs at which the paths are evaluated.
        n_samples: Number of paths. Zero returns an empty (0, len(grid)) array.
        seed: Seed of the path draws; restarts use `cfg.seed`.
        cfg: Settings for fitting the low-fidelity GP.
        variance: Signal variance of the outer kernel.
        lengthscale: Lengthscale of the outer kernel.

    Returns:
        np.ndarray: One path per row.

    Raises:
        InputError: If `spec` is not depth 2 or `n_samples` is negative.
        NumericalError: If the effective Gram cannot be factorized.
    """
    if len(spec) != 2:  # noqa: PLR2004
        msg = f"prior sampling needs a depth-2 composition, got {spec}"
        raise InputError(msg)
    moments = low_fidelity_moments(level, spec.inner, grid, cfg)
    kernel = EffectiveKernel(BaseKernel(spec.outer, variance, lengthscale), moments)
    K = kernel.gram(np.arange(len(moments)))
    logger.debug(f"Sampling {n_samples} paths of {spec} on {len(moments)} points")
    return sample_prior(K, n_samples, seed)
