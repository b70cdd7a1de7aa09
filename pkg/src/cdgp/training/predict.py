"""Prediction with a trained layered model."""

from dataclasses import replace

import numpy as np

from cdgp.models import FidelityDataset, Prediction, as_inputs
from cdgp.utils import InputError

from .config import TrainResult
from .multilevel import exposed_lml, propagate


def _check_data(result: TrainResult, data: FidelityDataset) -> None:
    if len(data) != len(result.spec):
        msg = f"model {result.spec} expects {len(result.spec)} levels, the data has {len(data)}"
        raise InputError(msg)


def predict(
    result: TrainResult, data: FidelityDataset, query: np.ndarray, full_cov: bool = False
) -> Prediction:
    """Posterior of the highest fidelity at `query`, in the units of `data`.

    Every stage's moments are computed once on the union of the downstream training inputs and
    the query points, so cross-covariances between training and query points are exact.

    Args:
        result: Output of training on `data`.
        data: The data the model was trained on.
        query: Query inputs, shape (q, d) or (q,) for scalar inputs.
        full_cov: Whether to keep the full posterior covariance.

    Returns:
        Prediction: Mean, variance and the learned noise of the highest level, with the LML
            reported by training.

    Raises:
        InputError: If the query dimension differs from the data or the level count differs
            from the composition depth.
    """
    _check_data(result, data)
    query = as_inputs(query)
    if query.shape[1] != data.dim:
        msg = f"query inputs have dimension {query.shape[1]}, the data has {data.dim}"
        raise InputError(msg)

    normalized = result.normalizer.apply(data)
    prediction, _ = propagate(
        result.spec, result.hyperparams, normalized.levels, result.normalizer.inputs(query)
    )
    if not full_cov:
        prediction = replace(prediction, covariance=None)
    return replace(result.normalizer.prediction(prediction), lml=result.lml)


def evaluate_lml(result: TrainResult, data: FidelityDataset) -> float:
    """Re-evaluate the exposed level's LML at the trained hyperparameters."""
    _check_data(result, data)
    return exposed_lml(result.spec, result.hyperparams, result.normalizer.apply(data).levels)
