"""Closed-form effective kernels of the conditional deep GP marginal prior.

An intermediate GP conditioned on lower-fidelity data gives a Gaussian over its values at
the downstream inputs, with mean `m` and covariance `C`. Marginalizing an outer SE or SC
kernel over that Gaussian has a closed form that depends on the pair (i, j) only through
`m_i - m_j` and `delta2_ij = c_ii + c_jj - 2 c_ij`, the variance of `f1(x_i) - f1(x_j)`.
"""

from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from cdgp.constants import DELTA_CLAMP_TOL, KernelFamily
from cdgp.utils import InputError, NumericalError

from .kernel import BaseKernel
from .linalg import stable_cholesky

# Quadratic form of (g_i - g_j)^2
PAIR_DIFFERENCE = np.array([[1.0, -1.0], [-1.0, 1.0]])


@dataclass(frozen=True, eq=False)
class ConditionalMoments:
    """Mean vector and full covariance of an intermediate GP at a fixed set of inputs."""

    mean: np.ndarray
    covariance: np.ndarray
    delta2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        """Validate shapes, symmetrize, and precompute delta squared."""
        mean = np.array(self.mean, dtype=np.float64).reshape(-1)
        cov = np.array(self.covariance, dtype=np.float64)
        n = mean.shape[0]
        if cov.shape != (n, n):
            msg = f"covariance shape {cov.shape} does not match mean length {n}"
            raise InputError(msg)
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        delta2 = pairwise_delta2(cov)
        delta2.setflags(write=False)
        object.__setattr__(self, "delta2", delta2)

    def __len__(self) -> int:
        """Number of points the moments are evaluated at."""
        return self.mean.shape[0]

    def subset(self, index: np.ndarray) -> "ConditionalMoments":
        """Return the moments restricted to `index`."""
        index = np.asarray(index, dtype=int)
        return ConditionalMoments(self.mean[index], self.covariance[np.ix_(index, index)])

    def pair(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Return the 2-vector mean and 2x2 covariance of (f1(x_i), f1(x_j))."""
        index = np.array([i, j])
        return self.mean[index], self.covariance[np.ix_(index, index)]


def pairwise_delta2(C: np.ndarray) -> np.ndarray:
    """Return delta2_ij = c_ii + c_jj - 2 c_ij for every pair.

    Negative values within round-off of zero are clamped to zero; the diagonal is exactly zero.

    Raises:
        NumericalError: If a value is negative beyond round-off, so `C` is not a covariance.
    """
    diag = np.diag(C)
    delta2 = diag[:, None] + diag[None, :] - 2.0 * C
    tol = DELTA_CLAMP_TOL * max(1.0, float(np.max(np.abs(diag), initial=0.0)))
    np.fill_diagonal(delta2, 0.0)
    if delta2.size and delta2.min() < -tol:
        i, j = np.unravel_index(int(np.argmin(delta2)), delta2.shape)
        msg = "conditional covariance is not positive semidefinite"
        raise NumericalError(
            msg, {"pair": (int(i), int(j)), "delta2": f"{delta2[i, j]:.3e}", "tolerance": tol}
        )
    return np.maximum(delta2, 0.0)


def _check_index(moments: ConditionalMoments, *indices: int) -> None:
    n = len(moments)
    for idx in indices:
        if not -n <= idx < n:
            msg = f"index {idx} out of range for {n} moments"
            raise IndexError(msg)


def expectation_exp_quadratic(m: np.ndarray, C: np.ndarray, A: np.ndarray) -> float:
    """Return E[exp(-g^T A g / 2)] for g ~ N(m, C).

    The closed form exp[-m^T C^-1 (I - (I + CA)^-1) m / 2] / sqrt|I + CA| is evaluated through
    the equivalent exponent -m^T (I + AC)^-1 A m / 2, which stays defined for singular `C`.

    Raises:
        InputError: If `A` is not symmetric PSD or the shapes disagree.
        NumericalError: If I + CA is singular.
    """
    m = np.asarray(m, dtype=np.float64).reshape(-1)
    C = np.asarray(C, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    n = m.shape[0]
    if C.shape != (n, n) or A.shape != (n, n):
        msg = f"shape mismatch: m {m.shape}, C {C.shape}, A {A.shape}"
        raise InputError(msg)
    if not np.allclose(A, A.T, atol=1e-12):
        msg = "A must be symmetric"
        raise InputError(msg)
    if n and np.linalg.eigvalsh(A)[0] < -1e-12 * max(1.0, np.abs(A).max()):
        msg = "A must be positive semidefinite so that the quadratic form is non-negative"
        raise InputError(msg)

    identity = np.eye(n)
    det = float(np.linalg.det(identity + C @ A))
    if not det > 0:
        msg = "I + CA is singular"
        raise NumericalError(msg, {"determinant": f"{det:.3e}"})
    exponent = -0.5 * float(m @ np.linalg.solve(identity + A @ C, A @ m))
    return float(np.exp(exponent) / np.sqrt(det))


def expectation_exp_inner(m: np.ndarray, C: np.ndarray, a: np.ndarray) -> float:
    """Return E[exp(a^T g)] = exp(a^T m + a^T C a / 2) for g ~ N(m, C).

    >>> expectation_exp_inner([1.0, 1.0], [[0.0, 0.0], [0.0, 0.0]], [1.0, 1.0]) == np.exp(2.0)
    True
    """
    m = np.asarray(m, dtype=np.float64).reshape(-1)
    C = np.asarray(C, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    n = m.shape[0]
    if a.shape != (n,) or C.shape != (n, n):
        msg = f"shape mismatch: m {m.shape}, C {C.shape}, a {a.shape}"
        raise InputError(msg)
    return float(np.exp(a @ m + 0.5 * np.trace(C @ np.outer(a, a))))


def se_effective(
    variance: float, lengthscale: float, dm: np.ndarray, delta2: np.ndarray
) -> np.ndarray:
    """SE outer kernel marginalized over a Gaussian warping, elementwise."""
    s = lengthscale**2
    return variance / np.sqrt(1.0 + delta2 / s) * np.exp(-(dm**2) / (2.0 * (s + delta2)))


def sc_effective(
    variance: float, lengthscale: float, dm: np.ndarray, delta2: np.ndarray
) -> np.ndarray:
    """SC outer kernel marginalized over a Gaussian warping, elementwise."""
    s = lengthscale**2
    return 0.5 * variance * (1.0 + np.cos(dm / lengthscale) * np.exp(-delta2 / (2.0 * s)))


def effective_kernel_se(
    moments: ConditionalMoments, variance: float, lengthscale: float, i: int, j: int
) -> float:
    """Return the SE[.] effective covariance between points `i` and `j` of `moments`."""
    _check_index(moments, i, j)
    dm = moments.mean[i] - moments.mean[j]
    return float(se_effective(variance, lengthscale, dm, moments.delta2[i, j]))


def effective_kernel_sc(
    moments: ConditionalMoments, variance: float, lengthscale: float, i: int, j: int
) -> float:
    """Return the SC[.] effective covariance between points `i` and `j` of `moments`.

    The lengthscale appears inside the cosine, cos((m_i - m_j) / lengthscale), as obtained from
    the exponential inner product expectation with a = (e_i - e_j) / lengthscale.
    """
    _check_index(moments, i, j)
    dm = moments.mean[i] - moments.mean[j]
    return float(sc_effective(variance, lengthscale, dm, moments.delta2[i, j]))


@dataclass(frozen=True)
class EffectivePartials:
    """Partial derivatives of an effective Gram matrix.

    Attributes:
        d_log_variance: dK/dlog(variance).
        d_log_lengthscale: dK/dlog(lengthscale).
        d_delta2: dK/d(delta2_ij), elementwise.
        d_dm: dK/d(m_i - m_j), elementwise.
    """

    d_log_variance: np.ndarray
    d_log_lengthscale: np.ndarray
    d_delta2: np.ndarray
    d_dm: np.ndarray


@dataclass(frozen=True)
class EffectiveKernel:
    """Outer kernel marginalized over the conditional moments of the layer below.

    Inputs to `gram` are integer positions into `moments`, so one set of moments computed on the
    union of training and query inputs serves both training and prediction.
    """

    outer: BaseKernel
    moments: ConditionalMoments

    def _pairs(self, A: np.ndarray, B: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
        a = np.asarray(A, dtype=int).reshape(-1)
        b = a if B is None else np.asarray(B, dtype=int).reshape(-1)
        n = len(self.moments)
        if (a.size and (a.min() < 0 or a.max() >= n)) or (b.size and (b.min() < 0 or b.max() >= n)):
            msg = f"effective kernel indices out of range for {n} moments"
            raise IndexError(msg)
        dm = self.moments.mean[a][:, None] - self.moments.mean[b][None, :]
        delta2 = self.moments.delta2[np.ix_(a, b)]
        return dm, delta2

    def gram(self, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
        """Return the effective covariance between index sets `A` and `B` (default `A`)."""
        dm, delta2 = self._pairs(A, B)
        evaluate = se_effective if self.outer.family is KernelFamily.SE else sc_effective
        K = evaluate(self.outer.variance, self.outer.lengthscale, dm, delta2)
        if B is None:
            K = 0.5 * (K + K.T)
        return K

    def diag(self, A: np.ndarray) -> np.ndarray:
        """Return k_eff(x_i, x_i), which equals the outer variance for both families."""
        return np.full(np.asarray(A).reshape(-1).shape[0], self.outer.variance)

    def partials(self, A: np.ndarray) -> EffectivePartials:
        """Return the partial derivatives of the Gram matrix over index set `A`."""
        dm, delta2 = self._pairs(A, None)
        variance, ell = self.outer.variance, self.outer.lengthscale
        s = ell**2
        if self.outer.family is KernelFamily.SE:
            K = se_effective(variance, ell, dm, delta2)
            t = s + delta2
            d_log_ell = K * (delta2 / t + s * dm**2 / t**2)
            d_delta2 = K * (-0.5 / t + 0.5 * dm**2 / t**2)
            d_dm = -K * dm / t
        else:
            K = sc_effective(variance, ell, dm, delta2)
            decay = np.exp(-delta2 / (2.0 * s))
            phase = dm / ell
            half = 0.5 * variance * decay
            d_log_ell = half * (np.sin(phase) * phase + np.cos(phase) * delta2 / s)
            d_delta2 = -half * np.cos(phase) / (2.0 * s)
            d_dm = -half * np.sin(phase) / ell
        return EffectivePartials(K, d_log_ell, d_delta2, d_dm)


def mc_oracle_kernel(
    outer: BaseKernel, m2: np.ndarray, C2: np.ndarray, n_samples: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo estimate of E[k(g_i, g_j)] for (g_i, g_j) ~ N(m2, C2).

    Args:
        outer: Outer kernel applied to the scalar pair.
        m2: Mean of the pair.
        C2: 2x2 covariance of the pair.
        n_samples: Number of draws, at least 1000.
        seed: Seed of the PCG64 stream.

    Returns:
        tuple[float, float]: The estimate and its standard error.

    Raises:
        InputError: If `n_samples` is below 1000 or shapes are wrong.
        NumericalError: If `C2` cannot be factorized.
    """
    if n_samples < 1000:  # noqa: PLR2004
        msg = f"n_samples must be at least 1000, got {n_samples}"
        raise InputError(msg)
    m2 = np.asarray(m2, dtype=np.float64).reshape(-1)
    C2 = np.asarray(C2, dtype=np.float64)
    if m2.shape != (2,) or C2.shape != (2, 2):
        msg = f"expected a 2-vector and a 2x2 matrix, got {m2.shape} and {C2.shape}"
        raise InputError(msg)

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_samples, 2))
    if np.any(C2 != 0):
        L = stable_cholesky(C2, scale=float(np.max(np.abs(C2)))).lower
        g = m2 + z @ L.T
    else:
        g = np.broadcast_to(m2, (n_samples, 2))
    values = outer.from_distance(np.abs(g[:, 0] - g[:, 1]))
    estimate = float(values.mean())
    std_error = float(values.std(ddof=1) / np.sqrt(n_samples))
    logger.trace(f"MC oracle: {estimate:.6f} ± {std_error:.2e} over {n_samples} draws")
    return estimate, std_error


def reduced_inverse_identity_check(C2: np.ndarray) -> bool:
    """Check the 2x2 identities behind the SE[.] closed form for a given covariance.

    With A the pair-difference form and delta2 = [1, -1] C2 [1, -1]^T, both
    I - (I + C2 A)^-1 = C2 A / (1 + delta2) and |I + C2 A| = 1 + delta2 must hold to 1e-10.
    """
    C2 = np.asarray(C2, dtype=np.float64)
    identity = np.eye(2)
    delta2 = float(np.array([1.0, -1.0]) @ C2 @ np.array([1.0, -1.0]))
    CA = C2 @ PAIR_DIFFERENCE
    lhs = identity - np.linalg.inv(identity + CA)
    rhs = CA / (1.0 + delta2)
    det = float(np.linalg.det(identity + CA))
    inverse_ok = np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10)
    det_ok = abs(det - (1.0 + delta2)) <= 1e-10 * max(1.0, abs(det))
    return bool(inverse_ok and det_ok)
