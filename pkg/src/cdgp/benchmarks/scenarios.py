"""Seeded multi-fidelity scenarios.

Random numbers come from numpy's PCG64 generator (`numpy.random.default_rng`) seeded with the
sequence `[seed, level, purpose]`: purpose 0 draws a level's inputs, purpose 1 its noise, and
purpose 2 the random test inputs of multi-dimensional scenarios (with `level` set to the number
of levels). Two scenarios that share a level's box, count and seed therefore share its inputs,
and a level's noise never depends on another level's settings.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from cdgp.models import FidelityDataset, FidelityLevel
from cdgp.utils import InputError

from . import functions as fn

INPUTS, NOISE, TEST_INPUTS = 0, 1, 2


@dataclass(frozen=True)
class ScenarioSpec:
    """Recipe for a multi-fidelity dataset.

    Attributes:
        name: Generator id used on the command line.
        functions: One test function per level, lowest fidelity first.
        counts: Observations per level.
        noise_std: Standard deviation of the Gaussian noise added to each level.
        box: Lower and upper bound of every input dimension.
        seed: Seed of the realized dataset.
        labels: Level labels written to the dataset.
    """

    name: str
    functions: tuple[fn.TestFunction, ...]
    counts: tuple[int, ...]
    noise_std: tuple[float, ...]
    box: tuple[tuple[float, float], ...] = fn.UNIT_BOX
    seed: int = 0
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        """Check that every level has a function, a count and a noise level."""
        n = len(self.functions)
        if not n or len(self.counts) != n or len(self.noise_std) != n:
            msg = f"scenario {self.name!r} needs one function, count and noise level per level"
            raise InputError(msg)
        if any(count < 1 for count in self.counts):
            msg = f"scenario {self.name!r} needs at least one observation per level"
            raise InputError(msg)
        if any(not noise >= 0 for noise in self.noise_std):
            msg = f"scenario {self.name!r} has a negative noise level"
            raise InputError(msg)
        if self.seed < 0:
            msg = f"seed must be non-negative, got {self.seed}"
            raise InputError(msg)
        if self.labels and len(self.labels) != n:
            msg = f"scenario {self.name!r} needs one label per level"
            raise InputError(msg)

    def __len__(self) -> int:
        """Number of fidelity levels."""
        return len(self.functions)

    @property
    def dim(self) -> int:
        """Input dimension."""
        return len(self.box)

    def with_seed(self, seed: int) -> "ScenarioSpec":
        """Return the same recipe with another seed."""
        return replace(self, seed=seed)

    def uniform(self, n: int, level: int, purpose: int = INPUTS) -> np.ndarray:
        """Draw `n` inputs uniformly from the box with the stream of `level` and `purpose`."""
        lo, hi = np.array(self.box, dtype=np.float64).T
        rng = np.random.default_rng([self.seed, level, purpose])
        return lo + (hi - lo) * rng.random((n, self.dim))

    def generate(self) -> FidelityDataset:
        """Realize the dataset for `self.seed`."""
        levels = []
        for k, (f, n, noise) in enumerate(zip(self.functions, self.counts, self.noise_std)):
            X = self.uniform(n, k)
            y = f(X)
            if noise > 0:
                y = y + noise * np.random.default_rng([self.seed, k, NOISE]).standard_normal(n)
            label = self.labels[k] if self.labels else f"level-{k + 1}"
            levels.append(FidelityLevel(X, y, noise, label))
        return FidelityDataset(tuple(levels))

    def truth(self, X: np.ndarray) -> np.ndarray:
        """Noise-free highest-fidelity values at `X`."""
        return self.functions[-1](X)

    def test_inputs(self, n: int) -> np.ndarray:
        """Evaluation inputs: an even grid for scalar inputs, uniform draws otherwise."""
        if self.dim == 1:
            ((lo, hi),) = self.box
            return np.linspace(lo, hi, n).reshape(-1, 1)
        return self.uniform(n, len(self), TEST_INPUTS)


def _nonlinear(
    name: str,
    low: fn.TestFunction,
    high: fn.TestFunction,
    counts: tuple[int, int],
    noise: tuple[float, float],
    seed: int,
) -> ScenarioSpec:
    return ScenarioSpec(name, (low, high), counts, noise, seed=seed, labels=("low", "high"))


def gen_synthetic_a(
    seed: int, n_low: int = 30, n_high: int = 10, noise: tuple[float, float] = (0.0, 0.0)
) -> FidelityDataset:
    """Observations of sin(8 pi x) (low) and (x - sqrt(2)) sin^2(8 pi x) (high) on [0, 1]."""
    spec = replace(SCENARIOS["synthetic-a"], counts=(n_low, n_high), noise_std=noise, seed=seed)
    return spec.generate()


def gen_synthetic_b(
    seed: int, n_low: int = 30, n_high: int = 15, noise: tuple[float, float] = (0.0, 0.0)
) -> FidelityDataset:
    """Observations of cos(15 x) (low) and x exp(cos(15 (2x - 0.2))) - 1 (high) on [0, 1]."""
    spec = replace(SCENARIOS["synthetic-b"], counts=(n_low, n_high), noise_std=noise, seed=seed)
    return spec.generate()


COMPOSITIONAL_LOW: dict[str, fn.TestFunction] = {
    "identity": fn.identity,
    "tanh": fn.tanh,
    "sin4pi": fn.sin_4pi,
    "sin8pi": fn.sin_8pi,
}


def gen_compositional_variants(
    seed: int, low_noise: float = 0.0, n_low: int = 30, n_high: int = 10
) -> list[FidelityDataset]:
    """Datasets pairing the first nonlinear scenario's high level with four low fidelities.

    The low fidelities are x, tanh x, sin 4 pi x and sin 8 pi x, in that order. Every variant
    shares the same high-fidelity observations and the same low-fidelity inputs.

    Args:
        seed: Seed shared by all variants.
        low_noise: Noise standard deviation of the low-fidelity observations.
        n_low: Low-fidelity observations.
        n_high: High-fidelity observations.
    """
    return [
        _nonlinear(
            f"compositional-{name}",
            low,
            fn.squared_warp,
            (n_low, n_high),
            (low_noise, 0.0),
            seed,
        ).generate()
        for name, low in COMPOSITIONAL_LOW.items()
    ]


def gen_denoising(seed: int, n_low: int = 30, n_high: int = 15) -> FidelityDataset:
    """Noisy (0.1) and nearly exact (0.001) observations of (x - sqrt(2)) sin^2(8 pi x)."""
    return replace(SCENARIOS["denoising"], counts=(n_low, n_high), seed=seed).generate()


def gen_borehole(seed: int, counts: Sequence[int] = (100, 25)) -> FidelityDataset:
    """Two-fidelity Borehole flow rates on the canonical 8-dimensional box."""
    return replace(SCENARIOS["borehole"], counts=tuple(counts), seed=seed).generate()


def gen_branin(seed: int, counts: Sequence[int] = (80, 30, 10)) -> FidelityDataset:
    """Three-fidelity Branin values on [-5, 10] x [0, 15]."""
    return replace(SCENARIOS["branin"], counts=tuple(counts), seed=seed).generate()


SCENARIOS: dict[str, ScenarioSpec] = {
    "synthetic-a": _nonlinear(
        "synthetic-a", fn.sin_8pi, fn.squared_warp, (30, 10), (0.0, 0.0), 0
    ),
    "synthetic-b": _nonlinear("synthetic-b", fn.cos_15, fn.exp_warp, (30, 15), (0.0, 0.0), 0),
    "denoising": _nonlinear(
        "denoising", fn.squared_warp, fn.squared_warp, (30, 15), (0.1, 0.001), 0
    ),
    "borehole": ScenarioSpec(
        "borehole",
        (fn.borehole_low, fn.borehole_high),
        (100, 25),
        (0.0, 0.0),
        box=fn.BOREHOLE_BOX,
        labels=("low", "high"),
    ),
    "branin": ScenarioSpec(
        "branin",
        (fn.branin_low, fn.branin_medium, fn.branin_high),
        (80, 30, 10),
        (0.0, 0.0, 0.0),
        box=fn.BRANIN_BOX,
        labels=("low", "medium", "high"),
    ),
}
for _name, _low in COMPOSITIONAL_LOW.items():
    SCENARIOS[f"compositional-{_name}"] = _nonlinear(
        f"compositional-{_name}", _low, fn.squared_warp, (30, 10), (0.0, 0.0), 0
    )


def get_scenario(name: str, seed: int = 0, low_noise: float | None = None) -> ScenarioSpec:
    """Look up a scenario by id.

    Compositional ids accept a `-noisy` suffix, which adds `low_noise` (default 0.1) to the
    low-fidelity observations.

    Raises:
        InputError: If `name` is not a known scenario.
    """
    noisy = name.endswith("-noisy") and name.startswith("compositional-")
    base = name.removesuffix("-noisy") if noisy else name
    if base not in SCENARIOS:
        known = ", ".join([*SCENARIOS, *(f"compositional-{n}-noisy" for n in COMPOSITIONAL_LOW)])
        msg = f"unknown scenario {name!r}; known scenarios: {known}"
        raise InputError(msg)
    spec = SCENARIOS[base].with_seed(seed)
    if noisy:
        noise = 0.1 if low_noise is None else low_noise
        spec = replace(spec, name=name, noise_std=(noise, *spec.noise_std[1:]))
    return spec
