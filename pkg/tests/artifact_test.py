# type: ignore
"""Test model files."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from cdgp.benchmarks import gen_synthetic_a
from cdgp.cli.artifact import DatasetSource, ModelArtifact
from cdgp.models import CompositionSpec
from cdgp.training import predict, train
from cdgp.utils import ArtifactError


@pytest.fixture()
def trained(fast_cfg):
    """A small SE[SE] model with its data and artifact."""
    data = gen_synthetic_a(0, n_low=12, n_high=5)
    result = train(data, CompositionSpec.parse("SE[SE]"), fast_cfg)
    source = DatasetSource(generator="synthetic-a", seed=0)
    return data, result, ModelArtifact.from_result(result, data, source, fast_cfg)


def test_artifact_round_trip(tmp_path, trained):
    """Verify a saved model predicts exactly like the trained one."""
    data, result, artifact = trained
    path = tmp_path / "models" / "model.json"
    artifact.save(path)
    loaded = ModelArtifact.load(path)
    assert loaded == artifact

    restored = loaded.to_result()
    assert restored.hyperparams == result.hyperparams
    assert restored.normalizer == result.normalizer
    query = np.linspace(0, 1, 9)
    np.testing.assert_array_equal(
        predict(restored, data, query).mean, predict(result, data, query).mean
    )
    assert loaded.moments.conditioning_points == [12]
    assert loaded.moments.evaluation_points == [5]


def test_artifact_file_is_stable(tmp_path, trained):
    """Verify saving twice writes identical bytes with the schema version."""
    _, _, artifact = trained
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    artifact.save(first)
    artifact.save(second)
    assert first.read_bytes() == second.read_bytes()
    content = json.loads(first.read_text())
    assert content["schema_version"] == 1
    assert content["spec"] == "SE[SE]"


def test_artifact_checks_the_dataset(trained):
    """Verify a model refuses data other than its training set."""
    data, _, artifact = trained
    artifact.check_data(data)
    with pytest.raises(ArtifactError, match="fingerprint"):
        artifact.check_data(gen_synthetic_a(1, n_low=12, n_high=5))


def test_artifact_load_errors(tmp_path, trained):
    """Verify missing, malformed and inconsistent model files."""
    with pytest.raises(ArtifactError, match="not found"):
        ModelArtifact.load(tmp_path / "missing.json")

    path = tmp_path / "model.json"
    path.write_text("{not json")
    with pytest.raises(ArtifactError, match="invalid model file"):
        ModelArtifact.load(path)

    _, _, artifact = trained
    content = json.loads(artifact.model_dump_json())
    content["schema_version"] = 2
    path.write_text(json.dumps(content))
    with pytest.raises(ArtifactError, match="schema_version"):
        ModelArtifact.load(path)

    content["schema_version"] = 1
    content["layers"][1]["family"] = "SC"
    path.write_text(json.dumps(content))
    with pytest.raises(ArtifactError, match="do not match"):
        ModelArtifact.load(path).to_result()


def test_dataset_source_needs_exactly_one_origin():
    """Verify a source names a generator or a file, never both."""
    with pytest.raises(ValidationError, match="exactly one"):
        DatasetSource()
    with pytest.raises(ValidationError, match="exactly one"):
        DatasetSource(generator="synthetic-a", path="data.csv")
    assert DatasetSource(path="data.csv").describe() == "data.csv"
    assert DatasetSource(generator="branin", seed=3).describe() == "branin (seed 3)"


@pytest.mark.parametrize(
    ("field", "value"),
    [("variance", -1.0), ("lengthscale", 0.0), ("noise_variance", -1e-3)],
)
def test_artifact_rejects_invalid_parameters(tmp_path, trained, field, value):
    """Verify non-positive kernel parameters and negative noise are model file errors."""
    _, _, artifact = trained
    content = json.loads(artifact.model_dump_json())
    content["layers"][0][field] = value
    path = tmp_path / "model.json"
    path.write_text(json.dumps(content))
    with pytest.raises(ArtifactError, match=f"layers.0.{field}"):
        ModelArtifact.load(path)


def test_artifact_with_unparsable_composition(trained):
    """Verify a composition that does not parse is reported as a model file error."""
    _, _, artifact = trained
    with pytest.raises(ArtifactError, match="unusable model"):
        artifact.model_copy(update={"spec": "SE[SE"}).to_result()
