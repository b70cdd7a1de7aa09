"""Reference models: the linear autoregressive two-fidelity GP and a single-fidelity GP."""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from cdgp.constants import ALPHA_BOUNDS, KernelFamily
from cdgp.models import (
    BaseKernel,
    FidelityDataset,
    FidelityLevel,
    Normalizer,
    Prediction,
    as_inputs,
    lml_and_gradient,
    posterior_from_grams,
    posterior_predict,
)
from cdgp.utils import InputError

from .config import TrainConfig
from .hyperparams import LayerParams, level_bounds
from .optimize import Objective, run_restarts, starting_points
from .stages import decode_stage, stage_objective


@dataclass(frozen=True)
class AR1Params:
    """Parameters of f = alpha * f1 + h with independent GPs f1 and h.

    Attributes:
        alpha: Scale between the fidelities, unconstrained.
        low: Kernel of f1.
        residual: Kernel of h.
        noise: Noise variances of the (low, high) observations.
    """

    alpha: float
    low: BaseKernel
    residual: BaseKernel
    noise: tuple[float, float]


@dataclass(frozen=True)
class AR1Fit:
    """Trained autoregressive model with the scaling it was trained under."""

    params: AR1Params
    lml: float
    normalizer: Normalizer


@dataclass(frozen=True)
class VanillaFit:
    """Trained single-fidelity GP with the scaling it was trained under."""

    family: KernelFamily
    layer: LayerParams
    noise: float
    lml: float
    normalizer: Normalizer


def ar1_joint_gram(params: AR1Params, X: np.ndarray, X1: np.ndarray) -> np.ndarray:
    """Noise-free covariance of the stacked observations (f(X), f1(X1)).

    Blocks: alpha^2 k(X, X) + k_h(X, X), alpha k(X, X1), and k(X1, X1).
    """
    X, X1 = as_inputs(X), as_inputs(X1)
    a = params.alpha
    high = a**2 * params.low.gram(X) + params.residual.gram(X)
    cross = a * params.low.gram(X, X1)
    return np.block([[high, cross], [cross.T, params.low.gram(X1)]])


def _decode_ar1(theta: np.ndarray, pinned: tuple[float | None, float | None]) -> AR1Params:
    low_end = 2 if pinned[0] is not None else 3
    low, noise_low = decode_stage(theta[:low_end], pinned[0])
    residual, noise_high = decode_stage(theta[low_end:-1], pinned[1])
    return AR1Params(
        alpha=float(theta[-1]),
        low=BaseKernel(KernelFamily.SE, low.variance, low.lengthscale),
        residual=BaseKernel(KernelFamily.SE, residual.variance, residual.lengthscale),
        noise=(noise_low, noise_high),
    )


def _ar1_objective(
    low: FidelityLevel, high: FidelityLevel, pinned: tuple[float | None, float | None]
) -> Objective:
    n, n1 = len(high), len(low)
    y = np.concatenate([high.y, low.y])
    zero_ll = np.zeros((n1, n1))
    zero_hl = np.zeros((n, n1))

    def objective(theta: np.ndarray) -> tuple[float, np.ndarray]:
        params = _decode_ar1(theta, pinned)
        a = params.alpha
        K_low, dK_low_ell = params.low.gram_gradients(low.X)
        K_cross, dK_cross_ell = params.low.gram_gradients(high.X, low.X)
        K_high, dK_high_ell = params.low.gram_gradients(high.X)
        K_res, dK_res_ell = params.residual.gram_gradients(high.X)

        K = np.block([[a**2 * K_high + K_res, a * K_cross], [a * K_cross.T, K_low]])
        noise = np.concatenate([np.full(n, params.noise[1]), np.full(n1, params.noise[0])])

        def low_kernel_block(hh: np.ndarray, hl: np.ndarray, ll: np.ndarray) -> np.ndarray:
            return np.block([[a**2 * hh, a * hl], [a * hl.T, ll]])

        dK = [
            low_kernel_block(K_high, K_cross, K_low),
            low_kernel_block(dK_high_ell, dK_cross_ell, dK_low_ell),
        ]
        if pinned[0] is None:
            dK.append(np.diag(np.concatenate([np.zeros(n), np.full(n1, params.noise[0])])))
        dK.append(np.block([[K_res, zero_hl], [zero_hl.T, zero_ll]]))
        dK.append(np.block([[dK_res_ell, zero_hl], [zero_hl.T, zero_ll]]))
        if pinned[1] is None:
            dK.append(np.diag(np.concatenate([np.full(n, params.noise[1]), np.zeros(n1)])))
        dK.append(np.block([[2.0 * a * K_high, K_cross], [K_cross.T, zero_ll]]))
        return lml_and_gradient(K, dK, y, noise)

    return objective


def ar1_train(data: FidelityDataset, cfg: TrainConfig) -> AR1Fit:
    """Maximize the LML of the stacked observations over alpha, both kernels and the noises.

    Alpha starts at 1 in every restart.

    Raises:
        InputError: If `data` does not have two levels or the high level is empty.
    """
    if len(data) != 2:  # noqa: PLR2004
        msg = f"the autoregressive model needs two fidelity levels, got {len(data)}"
        raise InputError(msg)
    if not len(data.high):
        msg = "the high-fidelity level is empty"
        raise InputError(msg)

    normalizer = Normalizer.fit(data) if cfg.normalize else Normalizer.identity(data)
    low, high = normalizer.apply(data).levels
    pinned = (
        None if cfg.learn_noise else low.noise_std**2,
        None if cfg.learn_noise else high.noise_std**2,
    )
    starts = [
        np.append(start, 1.0) for start in starting_points(2, cfg, learn_noise=cfg.learn_noise)
    ]
    bounds = level_bounds(cfg.learn_noise) * 2 + [ALPHA_BOUNDS]
    outcome = run_restarts(_ar1_objective(low, high, pinned), starts, bounds, cfg, stage="AR1")
    params = _decode_ar1(outcome.theta, pinned)
    logger.debug(f"AR1: alpha={params.alpha:.4g} LML={outcome.lml:.6f}")
    return AR1Fit(params, outcome.lml, normalizer)


def ar1_predict(fit: AR1Fit, data: FidelityDataset, query: np.ndarray) -> Prediction:
    """Condition f(query) on both levels' observations."""
    low, high = fit.normalizer.apply(data).levels
    Xq = fit.normalizer.inputs(query)
    p = fit.params
    K = ar1_joint_gram(p, high.X, low.X)
    K_cross = np.vstack(
        [
            p.alpha**2 * p.low.gram(high.X, Xq) + p.residual.gram(high.X, Xq),
            p.alpha * p.low.gram(low.X, Xq),
        ]
    )
    K_query = p.alpha**2 * p.low.gram(Xq) + p.residual.gram(Xq)
    noise = np.concatenate([np.full(len(high), p.noise[1]), np.full(len(low), p.noise[0])])
    mean, cov, _ = posterior_from_grams(K, K_cross, K_query, np.concatenate([high.y, low.y]), noise)
    prediction = Prediction(
        mean=mean,
        variance=np.maximum(np.diag(cov), 0.0),
        noise_variance=p.noise[1],
        lml=fit.lml,
    )
    return fit.normalizer.prediction(prediction)


def ar1_train_predict(data: FidelityDataset, query: np.ndarray, cfg: TrainConfig) -> Prediction:
    """Train the autoregressive model and predict the high fidelity at `query`.

    An empty low-fidelity level reduces the model to a single-fidelity GP on the high level.
    """
    if len(data) == 2 and not len(data[0]):  # noqa: PLR2004
        logger.debug("AR1: empty low-fidelity level, falling back to a single-fidelity GP")
        return vanilla_gp(data.high, query, cfg)
    return ar1_predict(ar1_train(data, cfg), data, query)


def vanilla_fit(
    level: FidelityLevel, cfg: TrainConfig, family: KernelFamily = KernelFamily.SE
) -> VanillaFit:
    """Fit a GP with a `family` kernel to one level's observations.

    Raises:
        InputError: If `level` is empty.
    """
    if not len(level):
        msg = "cannot fit a GP to an empty level"
        raise InputError(msg)
    data = FidelityDataset((level,))
    normalizer = Normalizer.fit(data) if cfg.normalize else Normalizer.identity(data)
    (scaled,) = normalizer.apply(data).levels
    pinned = None if cfg.learn_noise else scaled.noise_std**2
    outcome = run_restarts(
        stage_objective(family, None, scaled, pinned),
        starting_points(1, cfg, learn_noise=pinned is None),
        level_bounds(pinned is None),
        cfg,
        stage=f"Single-fidelity {family.value} GP",
    )
    layer, noise = decode_stage(outcome.theta, pinned)
    return VanillaFit(family, layer, noise, outcome.lml, normalizer)


def vanilla_predict(fit: VanillaFit, level: FidelityLevel, query: np.ndarray) -> Prediction:
    """Posterior of the fitted GP at `query`."""
    (scaled,) = fit.normalizer.apply(FidelityDataset((level,))).levels
    kernel = BaseKernel(fit.family, fit.layer.variance, fit.layer.lengthscale)
    prediction, _ = posterior_predict(
        kernel, scaled.X, scaled.y, fit.noise, fit.normalizer.inputs(query), full_cov=False
    )
    return fit.normalizer.prediction(prediction)


def vanilla_gp(level: FidelityLevel, query: np.ndarray, cfg: TrainConfig) -> Prediction:
    """Train an SE GP on one level and predict at `query`."""
    return vanilla_predict(vanilla_fit(level, cfg), level, query)
