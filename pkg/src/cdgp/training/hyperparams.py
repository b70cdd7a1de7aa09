"""Hyperparameters of a layered model and their log-space vector form."""

from dataclasses import dataclass

import numpy as np

from cdgp.constants import NOISE_BOUNDS, PARAM_BOUNDS
from cdgp.utils import InputError

PARAMS_PER_LEVEL = 3


@dataclass(frozen=True)
class LayerParams:
    """Signal variance and lengthscale of one layer."""

    variance: float
    lengthscale: float

    def __post_init__(self) -> None:
        """Reject non-positive values."""
        if not (self.variance > 0 and self.lengthscale > 0):
            msg = f"layer parameters must be positive, got {self.variance}, {self.lengthscale}"
            raise InputError(msg)


@dataclass(frozen=True)
class Hyperparams:
    """Per-layer kernel parameters and per-level noise variances.

    Layers and noise are ordered from the innermost layer (lowest fidelity) outwards. In vector
    form every level contributes `[log variance, log lengthscale, log noise]`.
    """

    layers: tuple[LayerParams, ...]
    noise: tuple[float, ...]

    def __post_init__(self) -> None:
        """Check that every layer has a noise value."""
        if len(self.layers) != len(self.noise):
            msg = f"{len(self.layers)} layers but {len(self.noise)} noise values"
            raise InputError(msg)
        if any(not v >= 0 for v in self.noise):
            msg = f"noise variances must be non-negative, got {self.noise}"
            raise InputError(msg)

    def __len__(self) -> int:
        """Number of layers."""
        return len(self.layers)

    @classmethod
    def from_log(cls, theta: np.ndarray) -> "Hyperparams":
        """Build from a vector of `[log variance, log lengthscale, log noise]` per level."""
        theta = np.asarray(theta, dtype=np.float64).reshape(-1, PARAMS_PER_LEVEL)
        values = np.exp(theta)
        return cls(
            layers=tuple(LayerParams(float(v), float(ell)) for v, ell, _ in values),
            noise=tuple(float(n) for _, _, n in values),
        )

    def to_log(self) -> np.ndarray:
        """Return the log-space vector; zero noise maps to the smallest allowed noise."""
        rows = [
            [layer.variance, layer.lengthscale, max(noise, NOISE_BOUNDS[0])]
            for layer, noise in zip(self.layers, self.noise, strict=True)
        ]
        return np.log(np.array(rows, dtype=np.float64)).reshape(-1)

    def level(self, k: int) -> tuple[LayerParams, float]:
        """Return the layer parameters and noise of 0-based level `k`."""
        return self.layers[k], self.noise[k]


def level_bounds(learn_noise: bool) -> list[tuple[float, float]]:
    """Log-space box constraints of one level's free parameters."""
    bounds = [tuple(np.log(PARAM_BOUNDS)), tuple(np.log(PARAM_BOUNDS))]
    if learn_noise:
        bounds.append(tuple(np.log(NOISE_BOUNDS)))
    return [(float(lo), float(hi)) for lo, hi in bounds]
