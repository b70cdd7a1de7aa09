"""Maximize a log marginal likelihood over log-space hyperparameters, with restarts."""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.optimize import minimize
from scipy.stats import qmc

from cdgp.constants import INIT_LOG_RANGE, INIT_NOISE_RANGE, InitStrategy, OptimizerKind
from cdgp.utils import NumericalError

from .config import TrainConfig

# Returns the LML and its gradient with respect to the log-space vector
Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]
Bounds = Sequence[tuple[float, float]]

PENALTY = 1e25
ARMIJO = 1e-4
MIN_STEP = 1e-12


@dataclass(frozen=True)
class RunOutcome:
    """Result of one optimization run.

    Attributes:
        theta: Final log-space parameters.
        lml: Objective at `theta`, re-evaluated after the run.
        trace: Objective after every accepted iteration, starting with the initial value.
        converged: Whether the gradient tolerance was met.
    """

    theta: np.ndarray
    lml: float
    trace: tuple[float, ...]
    converged: bool


def _evaluate(objective: Objective, theta: np.ndarray) -> tuple[float, np.ndarray]:
    """Evaluate the objective; factorization failures become -inf with a zero gradient."""
    try:
        lml, grad = objective(theta)
    except NumericalError as e:
        logger.trace(f"Objective failed at {np.round(theta, 4).tolist()}: {e}")
        return -np.inf, np.zeros_like(theta)
    if np.isfinite(lml) and not np.all(np.isfinite(grad)):
        msg = "non-finite gradient"
        raise NumericalError(msg, {"log_params": np.round(theta, 6).tolist()})
    return lml, grad


def projected_gradient(theta: np.ndarray, grad: np.ndarray, bounds: Bounds) -> np.ndarray:
    """Zero the gradient components that point out of the box at active bounds."""
    lo, hi = np.array(bounds, dtype=np.float64).T
    projected = np.array(grad, dtype=np.float64)
    projected[(theta <= lo) & (projected < 0)] = 0.0
    projected[(theta >= hi) & (projected > 0)] = 0.0
    return projected


def quasi_newton(
    objective: Objective, theta0: np.ndarray, bounds: Bounds, cfg: TrainConfig
) -> RunOutcome:
    """L-BFGS-B on the negative objective."""
    last: dict[str, tuple[np.ndarray, float]] = {}
    trace: list[float] = []

    def negative(theta: np.ndarray) -> tuple[float, np.ndarray]:
        lml, grad = _evaluate(objective, theta)
        last["point"] = (theta.copy(), lml)
        if not np.isfinite(lml):
            return PENALTY, np.zeros_like(theta)
        return -lml, -grad

    def record(xk: np.ndarray) -> None:
        point, value = last["point"]
        if not np.array_equal(point, xk):
            value = _evaluate(objective, xk)[0]
        trace.append(value)
        logger.trace(f"Iteration {len(trace)}: LML {value:.6f}")

    trace.append(_evaluate(objective, theta0)[0])
    result = minimize(
        negative,
        theta0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        callback=record,
        options={"maxiter": cfg.max_iters, "gtol": cfg.convergence_tol, "ftol": 1e-12},
    )
    theta = np.asarray(result.x, dtype=np.float64)
    lml, grad = _evaluate(objective, theta)
    residual = np.max(np.abs(projected_gradient(theta, grad, bounds)), initial=0.0)
    converged = bool(residual < cfg.convergence_tol)
    return RunOutcome(theta, lml, tuple(trace), converged)


def gradient_ascent(
    objective: Objective, theta0: np.ndarray, bounds: Bounds, cfg: TrainConfig
) -> RunOutcome:
    """Steepest ascent with Armijo backtracking; the trial step doubles after every success."""
    lo, hi = np.array(bounds, dtype=np.float64).T
    theta = np.clip(np.asarray(theta0, dtype=np.float64), lo, hi)
    lml, grad = _evaluate(objective, theta)
    trace = [lml]
    step = cfg.learning_rate
    converged = False

    for iteration in range(cfg.max_iters):
        direction = projected_gradient(theta, grad, bounds)
        if np.max(np.abs(direction), initial=0.0) < cfg.convergence_tol:
            converged = True
            break

        trial = step
        while True:
            candidate = np.clip(theta + trial * direction, lo, hi)
            new_lml, new_grad = _evaluate(objective, candidate)
            if new_lml >= lml + ARMIJO * float(direction @ (candidate - theta)):
                break
            trial *= 0.5
            if trial < MIN_STEP:
                break
        if trial < MIN_STEP:
            logger.trace(f"Line search stalled at iteration {iteration}")
            break

        moved = not np.array_equal(candidate, theta)
        theta, lml, grad = candidate, new_lml, new_grad
        trace.append(lml)
        logger.trace(f"Iteration {iteration + 1}: LML {lml:.6f}, step {trial:.2e}")
        if not moved:
            break
        step = 2.0 * trial

    lml, _ = _evaluate(objective, theta)
    return RunOutcome(theta, lml, tuple(trace), converged)


def maximize(
    objective: Objective, theta0: np.ndarray, bounds: Bounds, cfg: TrainConfig
) -> RunOutcome:
    """Run the optimizer selected in `cfg` from `theta0`."""
    if cfg.optimizer is OptimizerKind.QUASI_NEWTON:
        return quasi_newton(objective, theta0, bounds, cfg)
    return gradient_ascent(objective, theta0, bounds, cfg)


def starting_points(
    levels: int, cfg: TrainConfig, stream: int = 0, learn_noise: bool | None = None
) -> list[np.ndarray]:
    """Return one log-space starting vector per restart.

    The first restart starts from the configured fixed point. With `log-uniform-random`, the
    others draw variances and lengthscales log-uniformly from `INIT_LOG_RANGE` and noise from
    `INIT_NOISE_RANGE`, as a Latin hypercube: every coordinate puts exactly one restart in each
    of `restarts - 1` equal slices of its log range. With `fixed`, a single start is returned
    since every restart would be identical.

    Args:
        levels: Number of levels whose parameters make up the vector.
        cfg: Training settings.
        stream: Distinguishes stages trained with the same seed.
        learn_noise: Whether each level contributes a noise entry. Defaults to `cfg.learn_noise`.
    """
    learn_noise = cfg.learn_noise if learn_noise is None else learn_noise
    per_level = [cfg.init_variance, cfg.init_lengthscale]
    if learn_noise:
        per_level.append(cfg.init_noise)
    fixed = np.log(np.tile(per_level, levels))
    if cfg.init_strategy is InitStrategy.FIXED or cfg.restarts == 1:
        return [fixed]

    ranges = [INIT_LOG_RANGE, INIT_LOG_RANGE]
    if learn_noise:
        ranges.append(INIT_NOISE_RANGE)
    lo, hi = np.log(np.tile(np.array(ranges).T, levels))
    sampler = qmc.LatinHypercube(d=fixed.size, seed=np.random.default_rng([cfg.seed, stream]))
    draws = qmc.scale(sampler.random(cfg.restarts - 1), lo, hi)
    return [fixed, *draws]


def run_restarts(
    objective: Objective,
    starts: Sequence[np.ndarray],
    bounds: Bounds,
    cfg: TrainConfig,
    stage: str,
) -> RunOutcome:
    """Optimize from every start and keep the highest LML; earlier restarts win ties.

    Raises:
        NumericalError: If no restart reaches a finite LML.
    """

    def run(start: np.ndarray) -> RunOutcome | NumericalError:
        try:
            return maximize(objective, start, bounds, cfg)
        except NumericalError as e:
            return e

    if cfg.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(run, starts))
    else:
        outcomes = [run(start) for start in starts]

    best: RunOutcome | None = None
    failure: NumericalError | None = None
    for n, outcome in enumerate(outcomes, start=1):
        if isinstance(outcome, NumericalError):
            logger.debug(f"{stage}: restart {n} failed: {outcome}")
            failure = outcome
            continue
        logger.debug(f"{stage}: restart {n} reached LML {outcome.lml:.6f}")
        if np.isfinite(outcome.lml) and (best is None or outcome.lml > best.lml):
            best = outcome

    if best is None:
        msg = f"{stage}: no restart reached a finite log marginal likelihood"
        diagnostics = {"restarts": len(starts)}
        if failure is not None:
            diagnostics["last_error"] = str(failure)
        raise NumericalError(msg, diagnostics)
    return best
