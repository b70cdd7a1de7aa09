"""Cholesky factorization with a bounded jitter ladder, and covariance repair."""

from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.linalg import LinAlgError, cho_factor, cho_solve, eigh, solve_triangular

from cdgp.constants import JITTER_MAX, JITTER_START
from cdgp.utils import NumericalError


@dataclass(frozen=True)
class Factor:
    """Lower Cholesky factor of `K + jitter * I`."""

    lower: np.ndarray
    jitter: float

    @property
    def size(self) -> int:
        """Matrix dimension."""
        return self.lower.shape[0]

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Return (K + jitter I)^-1 b."""
        if self.size == 0:
            return np.zeros_like(b, dtype=np.float64)
        return cho_solve((self.lower, True), b)

    def half_solve(self, b: np.ndarray) -> np.ndarray:
        """Return L^-1 b."""
        if self.size == 0:
            return np.zeros((0,) + np.shape(b)[1:])
        return solve_triangular(self.lower, b, lower=True)

    def inverse(self) -> np.ndarray:
        """Return the explicit inverse (only used for gradient traces)."""
        return self.solve(np.eye(self.size))

    def log_det(self) -> float:
        """Return log |K + jitter I|."""
        return float(2.0 * np.sum(np.log(np.diag(self.lower))))


def jitter_ladder(scale: float) -> list[float]:
    """Return the jitter values tried in order: none, then 1e-10 up to 1e-6 times `scale`."""
    ladder = [0.0]
    value = JITTER_START
    while value <= JITTER_MAX * (1 + 1e-9):
        ladder.append(value * scale)
        value *= 10.0
    return ladder


def stable_cholesky(K: np.ndarray, scale: float | None = None) -> Factor:
    """Factorize a symmetric PSD matrix, escalating diagonal jitter when needed.

    Args:
        K: Square symmetric matrix.
        scale: Reference variance for the jitter ladder. Defaults to the mean diagonal of `K`.

    Returns:
        Factor: The lower factor and the jitter that made the factorization succeed.

    Raises:
        NumericalError: If the factorization fails at the largest jitter.
    """
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    if K.shape != (n, n):
        msg = f"expected a square matrix, got shape {K.shape}"
        raise NumericalError(msg)
    if n == 0:
        return Factor(np.zeros((0, 0)), 0.0)
    if not np.all(np.isfinite(K)):
        msg = "matrix contains non-finite entries"
        raise NumericalError(msg, {"size": n})

    if scale is None:
        scale = float(np.mean(np.diag(K)))
    scale = max(scale, np.finfo(float).tiny)

    for jitter in jitter_ladder(scale):
        try:
            c, _ = cho_factor(K + jitter * np.eye(n), lower=True, check_finite=False)
        except LinAlgError:
            continue
        if jitter > 0:
            logger.trace(f"Cholesky succeeded with jitter {jitter:.1e} on a {n}x{n} matrix")
        return Factor(np.tril(c), jitter)

    eigenvalues = np.linalg.eigvalsh(0.5 * (K + K.T))
    diagnostics = {
        "size": n,
        "max_jitter": f"{JITTER_MAX * scale:.1e}",
        "min_eigenvalue": f"{eigenvalues[0]:.3e}",
        "max_eigenvalue": f"{eigenvalues[-1]:.3e}",
    }
    msg = "Cholesky factorization failed after maximum jitter"
    raise NumericalError(msg, diagnostics)


def nearest_psd(C: np.ndarray) -> np.ndarray:
    """Symmetrize `C` and zero its negative eigenvalues.

    Posterior covariances lose positive semidefiniteness to cancellation when the training
    Gram is ill-conditioned; the layers above need a valid covariance.

    >>> nearest_psd(np.array([[1.0, 2.0], [2.0, 1.0]])).round(6).tolist()
    [[1.5, 1.5], [1.5, 1.5]]
    """
    C = 0.5 * (np.asarray(C, dtype=np.float64) + np.asarray(C, dtype=np.float64).T)
    if C.size == 0:
        return C
    eigenvalues, vectors = eigh(C)
    if eigenvalues[0] >= 0:
        return C
    logger.trace(f"Clipping covariance eigenvalues down to {eigenvalues[0]:.3e}")
    return (vectors * np.maximum(eigenvalues, 0.0)) @ vectors.T
