"""Two-level sequential training.

1. Fit a GP to the low-fidelity observations.
2. Take its posterior mean and full covariance at the high-fidelity inputs.
3. Marginalize the outer kernel over that Gaussian to get the effective kernel.
4. Fit a GP with the effective kernel to the high-fidelity observations.
"""

from cdgp.models import CompositionSpec, FidelityDataset
from cdgp.utils import InputError

from .config import TrainConfig, TrainResult
from .multilevel import train_layered


def train_sequential(
    data: FidelityDataset, spec: CompositionSpec, cfg: TrainConfig
) -> TrainResult:
    """Train a two-level model one stage at a time.

    Args:
        data: Two fidelity levels, low first.
        spec: Depth-2 composition such as `SE[SE]` or `SC[SE]`.
        cfg: Training settings. `cfg.mode` is ignored.

    Returns:
        TrainResult: Parameters of both layers and the LML of the high-fidelity observations.

    Raises:
        InputError: If the data or composition do not have two levels, or a level is empty.
        NumericalError: If a stage cannot be fit at any restart.
    """
    if len(spec) != 2:  # noqa: PLR2004
        msg = f"sequential two-level training needs a depth-2 composition, got {spec}"
        raise InputError(msg)
    return train_layered(data, spec, cfg)
