"""Hyperparameter learning and prediction for layered and reference models."""

from .hyperparams import Hyperparams, LayerParams, level_bounds  # isort:skip
from .config import TrainConfig, TrainResult  # isort:skip
from .optimize import RunOutcome, maximize, projected_gradient, run_restarts, starting_points
from .multilevel import exposed_lml, propagate, train_multilevel
from .sequential import train_sequential
from .joint import JOINT_PARAMETERS, joint_lml, lml_gradient_joint, train_joint
from .predict import evaluate_lml, predict
from .train import train
from .baselines import (
    AR1Fit,
    AR1Params,
    VanillaFit,
    ar1_joint_gram,
    ar1_predict,
    ar1_train,
    ar1_train_predict,
    vanilla_fit,
    vanilla_gp,
    vanilla_predict,
)
from .sampling import low_fidelity_moments, sample_effective_prior

__all__ = [
    "JOINT_PARAMETERS",
    "AR1Fit",
    "AR1Params",
    "Hyperparams",
    "LayerParams",
    "RunOutcome",
    "TrainConfig",
    "TrainResult",
    "VanillaFit",
    "ar1_joint_gram",
    "ar1_predict",
    "ar1_train",
    "ar1_train_predict",
    "evaluate_lml",
    "exposed_lml",
    "joint_lml",
    "level_bounds",
    "lml_gradient_joint",
    "low_fidelity_moments",
    "maximize",
    "predict",
    "projected_gradient",
    "propagate",
    "run_restarts",
    "sample_effective_prior",
    "starting_points",
    "train",
    "train_joint",
    "train_multilevel",
    "train_sequential",
    "vanilla_fit",
    "vanilla_gp",
    "vanilla_predict",
]
