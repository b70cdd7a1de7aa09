# type: ignore
"""Test compositions, datasets, their CSV form and normalization."""

import numpy as np
import pytest

from cdgp.benchmarks import gen_branin, gen_synthetic_a
from cdgp.constants import KernelFamily
from cdgp.models import (
    CompositionSpec,
    FidelityDataset,
    FidelityLevel,
    Normalizer,
    Prediction,
    load_csv,
    load_query_csv,
    save_csv,
)
from cdgp.utils import InputError, ParseError
from tests.conftest import FIXTURE_DATASET

SE = KernelFamily.SE
SC = KernelFamily.SC


@pytest.mark.parametrize(
    ("text", "families", "rendered"),
    [
        ("SE[SE]", (SE, SE), "SE[SE]"),
        ("SC[SE]", (SE, SC), "SC[SE]"),
        (" sc [ sc [ se ] ] ", (SE, SC, SC), "SC[SC[SE]]"),
        ("SE[SE[SE]]", (SE, SE, SE), "SE[SE[SE]]"),
    ],
)
def test_composition_parse(text, families, rendered):
    """Verify parsing orders families innermost first and renders canonically."""
    spec = CompositionSpec.parse(text)
    assert spec.families == families
    assert str(spec) == rendered
    assert spec.inner is families[0]
    assert spec.outer is families[-1]


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("SE[", "incomplete"),
        ("SE", "depth 1"),
        ("SE[SE]]", "unbalanced"),
        ("SE[XX]", "unexpected character"),
        ("SE SE", "missing '\\['"),
        ("SE[SE[SE[SE]]]", "depth 4"),
        ("[SE]", "expected a kernel family"),
    ],
)
def test_composition_parse_errors(text, message):
    """Verify malformed compositions raise parse errors."""
    with pytest.raises(ParseError, match=message):
        CompositionSpec.parse(text)


def test_level_validation():
    """Verify shape, finiteness and noise checks of a level."""
    with pytest.raises(InputError, match="2 inputs but 3 outputs"):
        FidelityLevel(np.zeros(2), np.zeros(3))
    with pytest.raises(InputError, match="non-finite"):
        FidelityLevel(np.zeros(2), np.array([0.0, np.nan]))
    with pytest.raises(InputError, match="noise_std"):
        FidelityLevel(np.zeros(2), np.zeros(2), noise_std=-1.0)


def test_dataset_validation():
    """Verify datasets need levels that share their input dimension."""
    with pytest.raises(InputError, match="at least one"):
        FidelityDataset(())
    with pytest.raises(InputError, match="different input dimensions"):
        FidelityDataset(
            (
                FidelityLevel(np.zeros((2, 1)), np.zeros(2)),
                FidelityLevel(np.zeros((2, 2)), np.zeros(2)),
            )
        )
    data = FidelityDataset(
        (
            FidelityLevel(np.zeros((0, 1)), np.zeros(0)),
            FidelityLevel(np.zeros((2, 3)), np.zeros(2)),
        )
    )
    assert data[0].X.shape == (0, 3)
    with pytest.raises(InputError, match="is empty"):
        data.check_levels(2)


def test_csv_round_trip(tmp_path):
    """Verify saving then loading reproduces values and metadata exactly."""
    data = gen_synthetic_a(3)
    path = tmp_path / "data.csv"
    save_csv(data, path)
    loaded = load_csv(path)
    assert loaded == data
    assert loaded.fingerprint() == data.fingerprint()
    assert [level.label for level in loaded] == ["low", "high"]


def test_csv_round_trip_three_levels(tmp_path):
    """Verify a two-dimensional, three-level dataset survives the CSV form."""
    data = gen_branin(1, (6, 4, 2))
    path = tmp_path / "branin.csv"
    save_csv(data, path)
    assert load_csv(path) == data


def test_load_fixture_dataset():
    """Verify a hand-written file with metadata comments."""
    data = load_csv(FIXTURE_DATASET)
    assert len(data) == 2
    assert [len(level) for level in data] == [10, 4]
    assert data.dim == 1
    assert data.high.label == "high"
    assert data[0].y[2] == 1.0


def test_load_csv_without_metadata(tmp_path):
    """Verify levels default to generic labels and zero noise."""
    path = tmp_path / "plain.csv"
    path.write_text("x_1,x_2,y,fidelity_level\n0.1,0.2,1.5,1\n0.3,0.4,2.5,2\n")
    data = load_csv(path)
    assert [level.label for level in data] == ["level-1", "level-2"]
    assert data[1].noise_std == 0.0
    assert data.dim == 2


@pytest.mark.parametrize(
    ("content", "error", "message"),
    [
        ("", InputError, "empty or has no header"),
        ("x_1,y\n", ParseError, "line 1: header must end"),
        ("x_1,y,fidelity_level\n0.1,abc,1\n", ParseError, "line 2: column 'y'"),
        ("x_1,y,fidelity_level\n0.1,1.0\n", ParseError, "line 2: expected 3 columns"),
        ("x_1,y,fidelity_level\n0.1,1.0,0\n", ParseError, "positive integer"),
        ("x_2,y,fidelity_level\n0.1,1.0,1\n", ParseError, "must be named x_1"),
        ("x_1,y,fidelity_level\n", InputError, "no observations"),
    ],
)
def test_load_csv_errors(tmp_path, content, error, message):
    """Verify malformed files raise with the offending line."""
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(error, match=message):
        load_csv(path)


def test_load_csv_missing_file(tmp_path):
    """Verify a missing file is an input error."""
    with pytest.raises(InputError, match="not found"):
        load_csv(tmp_path / "nope.csv")


def test_load_query_csv(tmp_path):
    """Verify query files with and without a truth column."""
    path = tmp_path / "query.csv"
    path.write_text("x_1,x_2,y\n0.1,0.2,3.0\n0.5,0.6,4.0\n")
    X, y = load_query_csv(path)
    np.testing.assert_array_equal(X, [[0.1, 0.2], [0.5, 0.6]])
    np.testing.assert_array_equal(y, [3.0, 4.0])

    path.write_text("x_1\n0.25\n")
    X, y = load_query_csv(path)
    assert X.shape == (1, 1)
    assert y is None

    path.write_text("a,b\n1,2\n")
    with pytest.raises(ParseError, match="query header"):
        load_query_csv(path)


def test_normalizer_maps_to_unit_box_and_back():
    """Verify inputs land in [0, 1] and outputs are standardized per level."""
    data = gen_branin(2, (12, 6, 4))
    normalizer = Normalizer.fit(data)
    scaled = normalizer.apply(data)
    X = np.vstack([level.X for level in scaled])
    assert X.min() == pytest.approx(0.0, abs=1e-12)
    assert X.max() == pytest.approx(1.0, abs=1e-12)
    for level in scaled:
        assert level.y.mean() == pytest.approx(0.0, abs=1e-10)
        assert level.y.std() == pytest.approx(1.0, rel=1e-10)
    np.testing.assert_allclose(normalizer.outputs(scaled.high.y), data.high.y, atol=1e-10)


def test_normalizer_rescales_predictions():
    """Verify predictions return to raw units with the variance scaled by the squared scale."""
    normalizer = Normalizer((0.0,), (1.0,), (1.0, 10.0), (1.0, 2.0))
    prediction = Prediction(np.array([0.0, 1.0]), np.array([1.0, 0.5]), noise_variance=0.1)
    raw = normalizer.prediction(prediction)
    np.testing.assert_allclose(raw.mean, [10.0, 12.0])
    np.testing.assert_allclose(raw.variance, [4.0, 2.0])
    assert raw.noise_variance == pytest.approx(0.4)


def test_identity_normalizer_leaves_data_unchanged():
    """Verify the identity normalizer is a no-op."""
    data = gen_synthetic_a(0)
    assert Normalizer.identity(data).apply(data) == data
