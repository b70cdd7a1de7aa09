"""Joint training of both layers on the high-fidelity marginal likelihood.

The effective Gram matrix depends on the low-fidelity layer only through the conditional mean
`m` and the pairwise variances `delta2`. With `B = K1^-1 Kx^T` and `alpha = K1^-1 y1`, a change
`dK` of the low-fidelity kernel moves them by

    dm = dKx alpha - B^T dK1 alpha
    dC = dKxx - dKx B - B^T dKx^T + B^T dK1 B

and the Gram matrix by `dK_eff/d(delta2) * d(delta2) + dK_eff/d(dm) * d(dm)`, elementwise.
"""

from collections.abc import Sequence
from typing import Literal

import numpy as np
from loguru import logger

from cdgp.constants import TrainMode
from cdgp.models import (
    BaseKernel,
    CompositionSpec,
    ConditionalMoments,
    EffectiveKernel,
    FidelityDataset,
    FidelityLevel,
    lml_and_gradient,
    nearest_psd,
    stable_cholesky,
)
from cdgp.utils import InputError

from .config import TrainConfig, TrainResult
from .hyperparams import PARAMS_PER_LEVEL, Hyperparams, LayerParams, level_bounds
from .multilevel import exposed_lml, fixed_noise, prepare
from .optimize import run_restarts, starting_points

Pathway = Literal["both", "mean", "covariance"]

JOINT_PARAMETERS = (
    "log_variance_1",
    "log_lengthscale_1",
    "log_noise_1",
    "log_variance_2",
    "log_lengthscale_2",
    "log_noise_2",
)


def _check_two_levels(levels: Sequence[FidelityLevel], spec: CompositionSpec) -> None:
    if len(spec) != 2 or len(levels) != 2:  # noqa: PLR2004
        msg = f"joint training supports two levels only, got {spec} with {len(levels)} levels"
        raise InputError(msg)


def _joint_lml_and_gradient(
    levels: Sequence[FidelityLevel],
    hyperparams: Hyperparams,
    spec: CompositionSpec,
    pathways: Pathway = "both",
    frozen_covariance: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    _check_two_levels(levels, spec)
    if pathways not in {"both", "mean", "covariance"}:
        msg = f"unknown gradient pathway {pathways!r}"
        raise InputError(msg)
    low, high = levels
    (inner, noise1), (outer, noise2) = hyperparams.level(0), hyperparams.level(1)
    n1, n = len(low), len(high)

    k1 = BaseKernel(spec.inner, inner.variance, inner.lengthscale)
    K1, dK1_ell = k1.gram_gradients(low.X)
    Kx, dKx_ell = k1.gram_gradients(high.X, low.X)
    Kxx, dKxx_ell = k1.gram_gradients(high.X)

    factor = stable_cholesky(K1 + noise1 * np.eye(n1))
    alpha1 = factor.solve(low.y)
    B = factor.solve(Kx.T)
    mean = Kx @ alpha1
    cov = nearest_psd(Kxx - Kx @ B) if frozen_covariance is None else frozen_covariance
    moments = ConditionalMoments(mean, cov)

    effective = EffectiveKernel(BaseKernel(spec.outer, outer.variance, outer.lengthscale), moments)
    partials = effective.partials(np.arange(n))
    K = partials.d_log_variance

    use_mean = pathways in {"both", "mean"}
    use_cov = pathways in {"both", "covariance"} and frozen_covariance is None
    lower_terms = [
        (K1, Kx, Kxx),
        (dK1_ell, dKx_ell, dKxx_ell),
        (noise1 * np.eye(n1), np.zeros_like(Kx), np.zeros_like(Kxx)),
    ]
    dK = []
    for dK1, dKx, dKxx in lower_terms:
        total = np.zeros((n, n))
        if use_mean:
            dm = dKx @ alpha1 - B.T @ (dK1 @ alpha1)
            total += partials.d_dm * (dm[:, None] - dm[None, :])
        if use_cov:
            dC = dKxx - dKx @ B - B.T @ dKx.T + B.T @ dK1 @ B
            d_diag = np.diag(dC)
            total += partials.d_delta2 * (d_diag[:, None] + d_diag[None, :] - 2.0 * dC)
        dK.append(total)
    dK.extend([partials.d_log_variance, partials.d_log_lengthscale, noise2 * np.eye(n)])

    return lml_and_gradient(K, dK, high.y, noise2)


def joint_lml(
    data: FidelityDataset,
    hyperparams: Hyperparams,
    spec: CompositionSpec,
    frozen_covariance: np.ndarray | None = None,
) -> float:
    """High-fidelity LML of a two-level model.

    When `frozen_covariance` is given it replaces the conditional covariance computed from the
    low-fidelity layer, so only the conditional mean follows the low-fidelity parameters.
    """
    return _joint_lml_and_gradient(
        data.levels, hyperparams, spec, frozen_covariance=frozen_covariance
    )[0]


def lml_gradient_joint(
    data: FidelityDataset,
    hyperparams: Hyperparams,
    spec: CompositionSpec,
    pathways: Pathway = "both",
) -> np.ndarray:
    """Gradient of the high-fidelity LML with respect to every parameter of both layers.

    Args:
        data: Two fidelity levels, in the units of `hyperparams`.
        hyperparams: Point at which to differentiate.
        spec: Depth-2 composition.
        pathways: Which low-fidelity dependencies to follow: the conditional mean, the
            conditional covariance, or both.

    Returns:
        np.ndarray: Derivatives ordered as `JOINT_PARAMETERS`, all with respect to logs.
    """
    return _joint_lml_and_gradient(data.levels, hyperparams, spec, pathways=pathways)[1]


def _decode(theta: np.ndarray, pinned: tuple[float | None, ...]) -> Hyperparams:
    values = np.exp(np.asarray(theta, dtype=np.float64))
    layers, noises, i = [], [], 0
    for noise in pinned:
        layers.append(LayerParams(float(values[i]), float(values[i + 1])))
        i += 2
        if noise is None:
            noises.append(float(values[i]))
            i += 1
        else:
            noises.append(noise)
    return Hyperparams(tuple(layers), tuple(noises))


def train_joint(data: FidelityDataset, spec: CompositionSpec, cfg: TrainConfig) -> TrainResult:
    """Fit both layers at once by maximizing the high-fidelity LML.

    Raises:
        InputError: For anything other than two non-empty levels and a depth-2 composition.
        NumericalError: If no restart reaches a finite LML, or the gradient stops being finite.
    """
    _check_two_levels(data.levels, spec)
    normalizer, normalized = prepare(data, spec, cfg)
    pinned = tuple(fixed_noise(level, cfg) for level in normalized)
    keep = [
        k * PARAMS_PER_LEVEL + j
        for k, noise in enumerate(pinned)
        for j in range(PARAMS_PER_LEVEL)
        if j < 2 or noise is None  # noqa: PLR2004
    ]

    def objective(theta: np.ndarray) -> tuple[float, np.ndarray]:
        lml, grad = _joint_lml_and_gradient(normalized.levels, _decode(theta, pinned), spec)
        return lml, grad[keep]

    outcome = run_restarts(
        objective,
        starting_points(2, cfg, learn_noise=cfg.learn_noise),
        level_bounds(cfg.learn_noise) * 2,
        cfg,
        stage=f"Joint {spec}",
    )
    hyperparams = _decode(outcome.theta, pinned)
    lml = exposed_lml(spec, hyperparams, normalized.levels)
    iterations = len(outcome.trace) - 1
    logger.debug(f"Trained {spec} jointly: LML {lml:.6f} after {iterations} iterations")
    return TrainResult(
        spec=spec,
        mode=TrainMode.JOINT,
        hyperparams=hyperparams,
        lml=lml,
        trace=outcome.trace,
        normalizer=normalizer,
        stage_lml=(lml,),
    )
