# type: ignore
"""Test the benchmark functions and seeded scenarios."""

import numpy as np
import pytest

from cdgp.benchmarks import (
    SCENARIOS,
    gen_borehole,
    gen_compositional_variants,
    gen_denoising,
    gen_synthetic_a,
    gen_synthetic_b,
    get_scenario,
)
from cdgp.benchmarks import functions as fn
from cdgp.utils import InputError


@pytest.mark.parametrize(
    ("function", "x", "expected", "tolerance"),
    [
        (fn.sin_8pi, 0.0625, 1.0, 1e-12),
        (fn.squared_warp, 0.0625, 0.0625 - np.sqrt(2.0), 1e-12),
        (fn.exp_warp, 0.0, -1.0, 1e-12),
        (fn.exp_warp, 0.5, 0.16266, 1e-4),
        (fn.cos_15, 0.0, 1.0, 1e-12),
        (fn.identity, 0.3, 0.3, 0.0),
    ],
)
def test_scalar_functions(function, x, expected, tolerance):
    """Verify the one-dimensional functions at known points."""
    assert function(x)[0] == pytest.approx(expected, abs=tolerance)


def test_branin_minima():
    """Verify the highest Branin fidelity at its three global minimizers."""
    values = fn.branin_high(np.array(fn.BRANIN_MINIMIZERS))
    np.testing.assert_allclose(values, fn.BRANIN_MINIMUM, atol=1e-5)


def test_borehole_fidelities_are_positive_and_related():
    """Verify both Borehole fidelities are positive flow rates that move together."""
    X = get_scenario("borehole").uniform(200, 0)
    high, low = fn.borehole_high(X), fn.borehole_low(X)
    assert np.all(high > 0)
    assert np.all(low > 0)
    assert np.corrcoef(high, low)[0, 1] > 0.9


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenarios_stay_in_their_box(name):
    """Verify every level's inputs lie in the scenario box and counts match."""
    scenario = get_scenario(name, seed=2)
    data = scenario.generate()
    lo, hi = np.array(scenario.box).T
    assert [len(level) for level in data] == list(scenario.counts)
    for level in data:
        assert np.all(level.X >= lo)
        assert np.all(level.X <= hi)
    assert scenario.test_inputs(20).shape == (20, scenario.dim)


def test_scenarios_are_deterministic():
    """Verify a seed always realizes the same data and different seeds differ."""
    assert gen_synthetic_a(4) == gen_synthetic_a(4)
    assert gen_synthetic_a(4).fingerprint() != gen_synthetic_a(5).fingerprint()
    assert get_scenario("branin", seed=1).generate() == get_scenario("branin", seed=1).generate()


def test_noiseless_scenarios_match_their_functions():
    """Verify noise-free observations are exact function values."""
    data = gen_synthetic_a(0)
    np.testing.assert_array_equal(data[0].y, fn.sin_8pi(data[0].X))
    np.testing.assert_array_equal(data.high.y, fn.squared_warp(data.high.X))


def test_compositional_variants_share_the_high_level():
    """Verify the four variants share high observations and low inputs."""
    variants = gen_compositional_variants(3)
    assert len(variants) == 4
    first = variants[0]
    for data in variants[1:]:
        assert data.high == first.high
        np.testing.assert_array_equal(data[0].X, first[0].X)
    np.testing.assert_array_equal(variants[0][0].y, variants[0][0].X[:, 0])
    np.testing.assert_array_equal(variants[1][0].y, np.tanh(first[0].X[:, 0]))


def test_compositional_variants_with_noise():
    """Verify low-level noise leaves the high level untouched."""
    clean = gen_compositional_variants(3)
    noisy = gen_compositional_variants(3, low_noise=0.1)
    for a, b in zip(clean, noisy, strict=True):
        assert a.high == b.high
        assert b[0].noise_std == 0.1
        assert not np.array_equal(a[0].y, b[0].y)


def test_denoising_noise_levels():
    """Verify the declared noise and the size of the residuals of each level."""
    data = gen_denoising(0, n_low=2000, n_high=15)
    assert data[0].noise_std == 0.1
    assert data.high.noise_std == 0.001
    residual = data[0].y - fn.squared_warp(data[0].X)
    assert residual.std() == pytest.approx(0.1, rel=0.1)
    assert np.max(np.abs(data.high.y - fn.squared_warp(data.high.X))) < 0.01


def test_get_scenario():
    """Verify lookups, the noisy suffix and unknown names."""
    noisy = get_scenario("compositional-tanh-noisy", seed=1)
    assert noisy.name == "compositional-tanh-noisy"
    assert noisy.noise_std == (0.1, 0.0)
    assert get_scenario("compositional-tanh-noisy", low_noise=0.3).noise_std[0] == 0.3
    assert get_scenario("synthetic-b", seed=7).seed == 7
    with pytest.raises(InputError, match="unknown scenario"):
        get_scenario("synthetic-z")
    with pytest.raises(InputError, match="unknown scenario"):
        get_scenario("synthetic-a-noisy")


def test_generators_use_their_default_counts():
    """Verify the generator helpers follow the registered level sizes."""
    synthetic = gen_synthetic_b(4)
    assert [len(level) for level in synthetic.levels] == [30, 15]
    np.testing.assert_allclose(synthetic.levels[1].y, fn.exp_warp(synthetic.levels[1].X[:, 0]))

    borehole = gen_borehole(4, counts=(12, 6))
    assert borehole.dim == 8
    assert [len(level) for level in borehole.levels] == [12, 6]
    np.testing.assert_allclose(borehole.levels[0].y, fn.borehole_low(borehole.levels[0].X))
