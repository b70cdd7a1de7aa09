"""Base covariance functions on raw inputs."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from cdgp.constants import KernelFamily
from cdgp.utils import InputError


def as_inputs(X: np.ndarray | list | float) -> np.ndarray:
    """Return `X` as a float (n, d) array; scalars and 1-d arrays are treated as d = 1."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(-1, 1)
    if arr.ndim != 2:  # noqa: PLR2004
        msg = f"inputs must be at most 2-dimensional, got shape {arr.shape}"
        raise InputError(msg)
    return arr


@dataclass(frozen=True)
class BaseKernel:
    """Stationary SE or SC kernel with a signal variance and an isotropic lengthscale.

    SE: k(r) = variance * exp(-r^2 / (2 lengthscale^2)).
    SC: k(r) = variance / 2 * (1 + cos(r / lengthscale)); only valid on scalar inputs.
    """

    family: KernelFamily
    variance: float
    lengthscale: float

    def __post_init__(self) -> None:
        """Validate positivity of the hyperparameters."""
        if not (np.isfinite(self.variance) and self.variance > 0):
            msg = f"kernel variance must be positive, got {self.variance}"
            raise InputError(msg)
        if not (np.isfinite(self.lengthscale) and self.lengthscale > 0):
            msg = f"kernel lengthscale must be positive, got {self.lengthscale}"
            raise InputError(msg)

    def from_distance(self, r: np.ndarray | float) -> np.ndarray:
        """Evaluate the kernel on Euclidean distances."""
        scaled = np.asarray(r, dtype=np.float64) / self.lengthscale
        if self.family is KernelFamily.SE:
            return self.variance * np.exp(-0.5 * scaled**2)
        return 0.5 * self.variance * (1.0 + np.cos(scaled))

    def _distances(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if A.shape[1] != B.shape[1]:
            msg = f"input dimensions differ: {A.shape[1]} vs {B.shape[1]}"
            raise InputError(msg)
        if self.family is KernelFamily.SC and A.shape[1] != 1:
            msg = f"the SC kernel needs scalar inputs, got d={A.shape[1]}"
            raise InputError(msg)
        if A.shape[0] == 0 or B.shape[0] == 0:
            return np.zeros((A.shape[0], B.shape[0]))
        return cdist(A, B, metric="euclidean")

    def __call__(self, xi: np.ndarray | float, xj: np.ndarray | float) -> float:
        """Return k(xi, xj) for two single inputs."""
        a = np.atleast_1d(np.asarray(xi, dtype=np.float64)).reshape(1, -1)
        b = np.atleast_1d(np.asarray(xj, dtype=np.float64)).reshape(1, -1)
        return float(self.from_distance(self._distances(a, b))[0, 0])

    def gram(self, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
        """Return the covariance matrix between the rows of `A` and `B` (default `A`)."""
        A = as_inputs(A)
        B = A if B is None else as_inputs(B)
        K = self.from_distance(self._distances(A, B))
        if B is A:
            K = 0.5 * (K + K.T)
        return K

    def gram_gradients(
        self, A: np.ndarray, B: np.ndarray | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return dK/dlog(variance) and dK/dlog(lengthscale) for the rows of `A` and `B`."""
        A = as_inputs(A)
        B = A if B is None else as_inputs(B)
        r = self._distances(A, B)
        K = self.from_distance(r)
        scaled = r / self.lengthscale
        if self.family is KernelFamily.SE:
            d_lengthscale = K * scaled**2
        else:
            d_lengthscale = 0.5 * self.variance * np.sin(scaled) * scaled
        return K, d_lengthscale

    def diag(self, A: np.ndarray) -> np.ndarray:
        """Return the prior variance at each row of `A`."""
        return np.full(as_inputs(A).shape[0], self.variance)

    def with_params(self, variance: float, lengthscale: float) -> "BaseKernel":
        """Return a kernel of the same family with new hyperparameters."""
        return BaseKernel(self.family, variance, lengthscale)


def kernel_eval(k: BaseKernel, xi: np.ndarray | float, xj: np.ndarray | float) -> float:
    """Evaluate `k` at a single pair of inputs.

    >>> round(kernel_eval(BaseKernel(KernelFamily.SE, 1.0, 1.0), 0.0, 1.0), 5)
    0.60653
    """
    a = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    b = np.atleast_1d(np.asarray(xj, dtype=np.float64))
    if a.shape != b.shape:
        msg = f"input dimensions differ: {a.shape} vs {b.shape}"
        raise InputError(msg)
    return k(a, b)
