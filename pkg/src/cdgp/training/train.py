"""Pick the training routine for a composition and mode."""

from cdgp.constants import TrainMode
from cdgp.models import CompositionSpec, FidelityDataset

from .config import TrainConfig, TrainResult
from .joint import train_joint
from .multilevel import train_multilevel
from .sequential import train_sequential


def train(data: FidelityDataset, spec: CompositionSpec, cfg: TrainConfig) -> TrainResult:
    """Train `spec` on `data` in the mode selected by `cfg`."""
    if cfg.mode is TrainMode.JOINT:
        return train_joint(data, spec, cfg)
    if len(spec) == 3:  # noqa: PLR2004
        return train_multilevel(data, spec, cfg)
    return train_sequential(data, spec, cfg)
