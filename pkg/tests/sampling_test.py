# type: ignore
"""Test prior sampling through a conditioned low-fidelity layer."""

import numpy as np
import pytest

from cdgp.constants import KernelFamily
from cdgp.models import BaseKernel, CompositionSpec, FidelityLevel
from cdgp.training import TrainConfig, low_fidelity_moments, sample_effective_prior
from cdgp.utils import InputError

SE_SE = CompositionSpec.parse("SE[SE]")
GRID = np.linspace(0, 1, 15)


@pytest.fixture()
def identity_level():
    """Dense noiseless observations of the identity function."""
    x = np.linspace(0, 1, 25)
    return FidelityLevel(x, x)


def test_low_fidelity_moments_are_in_raw_units(identity_level):
    """Verify the conditioned low layer reproduces its observations on the grid."""
    moments = low_fidelity_moments(
        identity_level, KernelFamily.SE, GRID, TrainConfig(learn_noise=False, restarts=2)
    )
    assert len(moments) == 15
    np.testing.assert_allclose(moments.mean, GRID, atol=1e-3)
    assert np.max(np.diag(moments.covariance)) < 1e-4


def test_identity_low_level_gives_the_outer_prior(identity_level):
    """Verify samples through an identity warp have the outer SE covariance."""
    cfg = TrainConfig(learn_noise=False, restarts=2)
    n = 20_000
    samples = sample_effective_prior(identity_level, SE_SE, GRID, n, 3, cfg, 1.0, 0.3)
    assert samples.shape == (n, 15)
    empirical = samples.T @ samples / n
    expected = BaseKernel(KernelFamily.SE, 1.0, 0.3).gram(GRID)
    np.testing.assert_allclose(empirical, expected, atol=0.06)


def test_sample_effective_prior_is_reproducible(identity_level):
    """Verify a seed fixes the paths and zero paths give an empty array."""
    cfg = TrainConfig(restarts=1)
    first = sample_effective_prior(identity_level, SE_SE, GRID, 4, 9, cfg)
    second = sample_effective_prior(identity_level, SE_SE, GRID, 4, 9, cfg)
    np.testing.assert_array_equal(first, second)
    assert sample_effective_prior(identity_level, SE_SE, GRID, 0, 9, cfg).shape == (0, 15)


def test_sample_effective_prior_rejects_other_depths(identity_level):
    """Verify only depth-2 compositions can be sampled."""
    with pytest.raises(InputError, match="depth-2"):
        sample_effective_prior(
            identity_level, CompositionSpec.parse("SE[SE[SE]]"), GRID, 2, 0, TrainConfig()
        )


def test_sc_inner_layer_needs_a_scalar_grid(identity_level):
    """Verify the SC inner family refuses a multi-dimensional grid."""
    with pytest.raises(InputError, match="scalar inputs"):
        low_fidelity_moments(identity_level, KernelFamily.SC, np.zeros((3, 2)), TrainConfig())
