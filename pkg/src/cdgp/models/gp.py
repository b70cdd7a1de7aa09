"""Exact zero-mean GP regression: marginal likelihood, posterior and prior samples."""

from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Protocol

import numpy as np

from cdgp.constants import BAND_Z, VARIANCE_FLOOR
from cdgp.utils import InputError

from .linalg import Factor, nearest_psd, stable_cholesky
from .moments import ConditionalMoments

LOG_2PI = float(np.log(2.0 * np.pi))


class GramKernel(Protocol):
    """Anything that assembles covariance matrices over a set of inputs.

    `BaseKernel` takes input coordinates; `EffectiveKernel` takes positions into its moments.
    """

    def gram(self, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
        """Covariance between `A` and `B` (default `A`)."""
        ...

    def diag(self, A: np.ndarray) -> np.ndarray:
        """Prior variance at each input of `A`."""
        ...


@dataclass(frozen=True)
class Prediction:
    """Posterior predictive distribution at a set of query inputs.

    Attributes:
        mean: Posterior mean of the latent function.
        variance: Posterior variance of the latent function, clamped at zero.
        noise_variance: Observation noise of the predicted level. Metrics add it to `variance`.
        lml: Log marginal likelihood of the model that produced the prediction.
        covariance: Full latent posterior covariance, when requested.
    """

    mean: np.ndarray
    variance: np.ndarray
    noise_variance: float = 0.0
    lml: float = float("nan")
    covariance: np.ndarray | None = None

    def __len__(self) -> int:
        """Number of query points."""
        return self.mean.shape[0]

    @property
    def total_variance(self) -> np.ndarray:
        """Predictive variance of a new observation."""
        return self.variance + self.noise_variance

    @property
    def std(self) -> np.ndarray:
        """Predictive standard deviation of a new observation."""
        return np.sqrt(self.total_variance)

    def band(self, latent: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Return the central 95% band, of the latent function when `latent` is set."""
        var = self.variance if latent else self.total_variance
        half = BAND_Z * np.sqrt(var)
        return self.mean - half, self.mean + half

    def _check_truth(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if y.shape != self.mean.shape:
            msg = f"expected {len(self)} truth values, got {y.shape[0]}"
            raise InputError(msg)
        return y

    def neg_log_density(self, y: np.ndarray) -> np.ndarray:
        """Per-point negative log predictive density of `y`."""
        y = self._check_truth(y)
        var = np.maximum(self.total_variance, VARIANCE_FLOOR)
        return 0.5 * (LOG_2PI + np.log(var) + (y - self.mean) ** 2 / var)

    def mnll(self, y: np.ndarray) -> float:
        """Mean negative log predictive likelihood of `y`."""
        return float(np.mean(self.neg_log_density(y)))

    def rmse(self, y: np.ndarray) -> float:
        """Root mean squared error of the mean against `y`."""
        y = self._check_truth(y)
        return float(np.sqrt(np.mean((y - self.mean) ** 2)))

    def coverage(self, y: np.ndarray, latent: bool = False) -> float:
        """Fraction of `y` inside the central 95% band."""
        y = self._check_truth(y)
        lower, upper = self.band(latent=latent)
        return float(np.mean((y >= lower) & (y <= upper)))

    def rescaled(self, shift: float, scale: float) -> "Prediction":
        """Return the prediction of `shift + scale * f`."""
        s2 = scale**2
        return replace(
            self,
            mean=shift + scale * self.mean,
            variance=s2 * self.variance,
            noise_variance=s2 * self.noise_variance,
            covariance=None if self.covariance is None else s2 * self.covariance,
        )


def _check_targets(
    K: np.ndarray, y: np.ndarray, noise: float | np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = y.shape[0]
    if K.shape != (n, n):
        msg = f"Gram shape {K.shape} does not match {n} targets"
        raise InputError(msg)
    try:
        noise_diag = np.broadcast_to(np.asarray(noise, dtype=np.float64), (n,))
    except ValueError:
        msg = f"noise must be a scalar or one value per target, got shape {np.shape(noise)}"
        raise InputError(msg) from None
    if not np.all(noise_diag >= 0):
        msg = f"noise variance must be non-negative, got {noise}"
        raise InputError(msg)
    return K, y, noise_diag


def fit_gram(
    K: np.ndarray, y: np.ndarray, noise: float | np.ndarray
) -> tuple[Factor, np.ndarray, float]:
    """Factorize K + diag(noise) and return the factor, its solve against `y`, and the LML.

    `noise` is a scalar or one variance per target.
    """
    K, y, noise_diag = _check_targets(K, y, noise)
    n = y.shape[0]
    factor = stable_cholesky(K + np.diag(noise_diag))
    alpha = factor.solve(y)
    lml = -0.5 * float(y @ alpha) - 0.5 * factor.log_det() - 0.5 * n * LOG_2PI
    return factor, alpha, lml


def log_marginal_likelihood(K: np.ndarray, y: np.ndarray, noise: float) -> float:
    """Return log N(y | 0, K + noise * I).

    >>> round(log_marginal_likelihood(np.eye(2), np.zeros(2), 1.0), 5)
    -2.53102

    Raises:
        InputError: If shapes disagree or `noise` is negative.
        NumericalError: If the Cholesky factorization fails at the largest jitter.
    """
    return fit_gram(K, y, noise)[2]


def lml_and_gradient(
    K: np.ndarray, dK: Sequence[np.ndarray], y: np.ndarray, noise: float | np.ndarray
) -> tuple[float, np.ndarray]:
    """Return the LML and its derivatives.

    Args:
        K: Noise-free Gram matrix.
        dK: Derivatives of K + noise * I with respect to each parameter.
        y: Targets.
        noise: Observation noise variance.

    Returns:
        tuple[float, np.ndarray]: The LML and one derivative per entry of `dK`, each equal to
            tr((alpha alpha^T - (K + noise I)^-1) dK) / 2.
    """
    factor, alpha, lml = fit_gram(K, y, noise)
    weight = np.outer(alpha, alpha) - factor.inverse()
    grad = np.array([0.5 * float(np.sum(weight * d)) for d in dK])
    return lml, grad


def posterior_from_grams(
    K: np.ndarray,
    K_cross: np.ndarray,
    K_query: np.ndarray,
    y: np.ndarray,
    noise: float | np.ndarray,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Condition a zero-mean GP on noisy targets.

    Args:
        K: Training Gram matrix (n, n).
        K_cross: Covariance between training and query inputs (n, q).
        K_query: Prior covariance of the query inputs (q, q).
        y: Training targets.
        noise: Noise variance added to the training diagonal.

    Returns:
        tuple: Posterior mean (q,), posterior covariance (q, q) with negative eigenvalues
            clipped, and the training LML.
    """
    K, y, _ = _check_targets(K, y, noise)
    if y.shape[0] == 0:
        return np.zeros(K_query.shape[0]), np.array(K_query, dtype=np.float64), 0.0
    factor, alpha, lml = fit_gram(K, y, noise)
    mean = K_cross.T @ alpha
    V = factor.half_solve(K_cross)
    return mean, nearest_psd(K_query - V.T @ V), lml


def posterior_predict(
    kernel: GramKernel,
    X: np.ndarray,
    y: np.ndarray,
    noise: float,
    X_query: np.ndarray,
    full_cov: bool = True,
) -> tuple[Prediction, ConditionalMoments]:
    """Return the posterior at `X_query` given noisy observations (`X`, `y`).

    The conditional moments carry the full posterior covariance at the query inputs; they are
    what the layer above marginalizes over.

    Raises:
        InputError: If the number of inputs and targets differ.
        NumericalError: If the training Gram cannot be factorized.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if np.shape(X)[0] != y.shape[0]:
        msg = f"{np.shape(X)[0]} training inputs but {y.shape[0]} targets"
        raise InputError(msg)

    K_query = kernel.gram(X_query)
    if y.shape[0] == 0:
        K = np.zeros((0, 0))
        K_cross = np.zeros((0, K_query.shape[0]))
    else:
        K = kernel.gram(X)
        K_cross = kernel.gram(X, X_query)
    mean, cov, lml = posterior_from_grams(K, K_cross, K_query, y, noise)

    moments = ConditionalMoments(mean, cov)
    prediction = Prediction(
        mean=moments.mean,
        variance=np.maximum(np.diag(moments.covariance), 0.0),
        noise_variance=float(noise),
        lml=lml,
        covariance=moments.covariance if full_cov else None,
    )
    return prediction, moments


def sample_prior(K: np.ndarray, n_samples: int, seed: int) -> np.ndarray:
    """Draw `n_samples` i.i.d. paths from N(0, K) using a PCG64 stream.

    Returns:
        np.ndarray: Array of shape (n_samples, N), one path per row.
    """
    if n_samples < 0:
        msg = f"n_samples must be non-negative, got {n_samples}"
        raise InputError(msg)
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    factor = stable_cholesky(K)
    z = np.random.default_rng(seed).standard_normal((n_samples, n))
    return z @ factor.lower.T
