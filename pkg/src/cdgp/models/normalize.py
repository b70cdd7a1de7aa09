"""Input and output scaling applied before training and undone after prediction."""

from dataclasses import dataclass

import numpy as np

from .dataset import FidelityDataset, FidelityLevel
from .gp import Prediction
from .kernel import as_inputs


@dataclass(frozen=True)
class Normalizer:
    """Affine maps to the unit box of all inputs and to standardized outputs per level.

    Attributes:
        x_offset: Per-dimension minimum of the union of all inputs.
        x_scale: Per-dimension range of the union of all inputs (1 where the range is zero).
        y_shift: Mean of each level's outputs.
        y_scale: Standard deviation of each level's outputs (1 when undefined or zero).
    """

    x_offset: tuple[float, ...]
    x_scale: tuple[float, ...]
    y_shift: tuple[float, ...]
    y_scale: tuple[float, ...]

    @classmethod
    def identity(cls, data: FidelityDataset) -> "Normalizer":
        """Return a normalizer that leaves `data` unchanged."""
        return cls(
            x_offset=(0.0,) * data.dim,
            x_scale=(1.0,) * data.dim,
            y_shift=(0.0,) * len(data),
            y_scale=(1.0,) * len(data),
        )

    @classmethod
    def fit(cls, data: FidelityDataset) -> "Normalizer":
        """Fit the input box and per-level output statistics of `data`."""
        X = np.vstack([level.X for level in data])
        if X.shape[0]:
            lo, hi = X.min(axis=0), X.max(axis=0)
            span = np.where(hi - lo > 0, hi - lo, 1.0)
        else:
            lo, span = np.zeros(data.dim), np.ones(data.dim)

        shifts, scales = [], []
        for level in data:
            shift = float(level.y.mean()) if len(level) else 0.0
            scale = float(level.y.std()) if len(level) > 1 else 1.0
            shifts.append(shift)
            scales.append(scale if scale > 0 else 1.0)
        return cls(
            x_offset=tuple(float(v) for v in lo),
            x_scale=tuple(float(v) for v in span),
            y_shift=tuple(shifts),
            y_scale=tuple(scales),
        )

    def inputs(self, X: np.ndarray) -> np.ndarray:
        """Map raw inputs into the normalized space."""
        return (as_inputs(X) - np.asarray(self.x_offset)) / np.asarray(self.x_scale)

    def apply(self, data: FidelityDataset) -> FidelityDataset:
        """Return the normalized copy of `data`; noise metadata is scaled with the outputs."""
        levels = []
        for k, level in enumerate(data):
            shift, scale = self.y_shift[k], self.y_scale[k]
            levels.append(
                FidelityLevel(
                    self.inputs(level.X),
                    (level.y - shift) / scale,
                    level.noise_std / scale,
                    level.label,
                )
            )
        return FidelityDataset(tuple(levels))

    def outputs(self, y: np.ndarray, level: int = -1) -> np.ndarray:
        """Map normalized outputs of `level` back to raw units."""
        return self.y_shift[level] + self.y_scale[level] * np.asarray(y)

    def prediction(self, prediction: Prediction, level: int = -1) -> Prediction:
        """Map a normalized prediction of `level` back to raw units."""
        return prediction.rescaled(self.y_shift[level], self.y_scale[level])
