"""Training settings and results."""

from dataclasses import dataclass, field

from cdgp.constants import InitStrategy, OptimizerKind, TrainMode
from cdgp.models import CompositionSpec, Normalizer
from cdgp.utils import InputError

from .hyperparams import Hyperparams


@dataclass(frozen=True)
class TrainConfig:
    """Settings for one training run.

    Attributes:
        mode: Sequential stage-by-stage fitting or joint fitting of all layers.
        optimizer: Quasi-Newton (L-BFGS-B) or gradient ascent with backtracking.
        max_iters: Iteration cap per optimization run.
        restarts: Optimization runs per stage; the best LML wins.
        init_strategy: Starting points of restarts after the first.
        convergence_tol: Gradient tolerance.
        seed: Seed for random restarts.
        learning_rate: Initial step of gradient ascent. Zero leaves the parameters untouched.
        learn_noise: Learn noise variances, or pin them at the declared noise of each level.
        normalize: Rescale inputs and standardize outputs before training.
        workers: Threads used to run restarts concurrently.
        init_variance: Variance of the fixed starting point.
        init_lengthscale: Lengthscale of the fixed starting point.
        init_noise: Noise variance of the fixed starting point.
    """

    mode: TrainMode = TrainMode.SEQUENTIAL
    optimizer: OptimizerKind = OptimizerKind.QUASI_NEWTON
    max_iters: int = 200
    restarts: int = 5
    init_strategy: InitStrategy = InitStrategy.LOG_UNIFORM_RANDOM
    convergence_tol: float = 1e-5
    seed: int = 0
    learning_rate: float = 0.1
    learn_noise: bool = True
    normalize: bool = True
    workers: int = 1
    init_variance: float = 1.0
    init_lengthscale: float = 1.0
    init_noise: float = 1e-2

    def __post_init__(self) -> None:
        """Validate counts and tolerances."""
        problems = []
        if self.max_iters < 1:
            problems.append(f"max_iters must be at least 1, got {self.max_iters}")
        if self.restarts < 1:
            problems.append(f"restarts must be at least 1, got {self.restarts}")
        if self.seed < 0:
            problems.append(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            problems.append(f"workers must be at least 1, got {self.workers}")
        if not self.convergence_tol > 0:
            problems.append(f"convergence_tol must be positive, got {self.convergence_tol}")
        if not self.learning_rate >= 0:
            problems.append(f"learning_rate must be non-negative, got {self.learning_rate}")
        if not min(self.init_variance, self.init_lengthscale, self.init_noise) > 0:
            problems.append("initial variance, lengthscale and noise must be positive")
        if problems:
            raise InputError("; ".join(problems))


@dataclass(frozen=True)
class TrainResult:
    """Outcome of training a layered model.

    Attributes:
        spec: Kernel composition that was trained.
        mode: Mode that produced the result.
        hyperparams: Learned parameters, in normalized units when `normalizer` is not identity.
        lml: Log marginal likelihood of the exposed level at `hyperparams`.
        trace: Objective values per iteration of the winning run of the last stage (the only
            stage in joint mode).
        normalizer: Scaling applied to the data before training.
        stage_lml: Final LML of every stage, innermost first.
    """

    spec: CompositionSpec
    mode: TrainMode
    hyperparams: Hyperparams
    lml: float
    trace: tuple[float, ...]
    normalizer: Normalizer
    stage_lml: tuple[float, ...] = field(default=())
