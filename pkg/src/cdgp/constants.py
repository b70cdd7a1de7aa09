"""Constants for cdgp."""

import os
from enum import Enum
from pathlib import Path

import typer


class KernelFamily(str, Enum):
    """Base kernel family."""

    SE = "SE"
    SC = "SC"


class TrainMode(str, Enum):
    """Hyperparameter learning mode."""

    SEQUENTIAL = "sequential"
    JOINT = "joint"


class OptimizerKind(str, Enum):
    """Optimizer used to maximize the log marginal likelihood."""

    GRADIENT_DESCENT = "gradient-descent"
    QUASI_NEWTON = "quasi-newton"


class InitStrategy(str, Enum):
    """How restarts pick their initial hyperparameters."""

    FIXED = "fixed"
    LOG_UNIFORM_RANDOM = "log-uniform-random"


APP_DIR = Path(os.environ.get("CDGP_HOME", typer.get_app_dir("cdgp")))
CONFIG_PATH = APP_DIR / "config.toml"
VERSION = "0.1.0"
SCHEMA_VERSION = 1

# Jitter ladder relative to the mean diagonal of the matrix being factorized
JITTER_START = 1e-10
JITTER_MAX = 1e-6

# Relative round-off tolerance on a negative delta squared; beyond it the covariance is rejected
DELTA_CLAMP_TOL = 1e-12

# Log-uniform range used by random restarts for variances and lengthscales
INIT_LOG_RANGE = (1e-2, 1e1)
INIT_NOISE_RANGE = (1e-6, 1e-1)

# Box constraints on log-parameters during optimization. Outputs are standardized, so the noise
# floor is relative to unit variance.
PARAM_BOUNDS = (1e-4, 1e4)
NOISE_BOUNDS = (1e-6, 1e1)
ALPHA_BOUNDS = (-1e2, 1e2)

# 95% central band
BAND_Z = 1.959963984540054

# Smallest predictive variance used inside log densities
VARIANCE_FLOOR = 1e-12

EXIT_FAILURE = 1
EXIT_USAGE = 2
