"""Model files: a trained layered model as indented, versioned JSON."""

from pathlib import Path
from typing import Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    NonNegativeFloat,
    PositiveFloat,
    ValidationError,
    model_validator,
)

from cdgp.benchmarks import get_scenario
from cdgp.constants import SCHEMA_VERSION, KernelFamily, TrainMode
from cdgp.models import CompositionSpec, FidelityDataset, Normalizer, load_csv
from cdgp.training import Hyperparams, LayerParams, TrainConfig, TrainResult
from cdgp.utils import ArtifactError, InputError


class DatasetSource(BaseModel):
    """Where a dataset comes from: a scenario generator and seed, or a CSV file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    generator: str | None = None
    seed: int | None = None
    low_noise: float | None = None
    path: str | None = None

    @model_validator(mode="after")
    def exactly_one_source(self) -> "DatasetSource":
        """Reject sources naming both or neither of a generator and a file."""
        if (self.generator is None) == (self.path is None):
            msg = "give exactly one of a generator or a data file"
            raise ValueError(msg)
        return self

    def load(self) -> FidelityDataset:
        """Generate or read the dataset."""
        if self.generator is not None:
            return get_scenario(self.generator, self.seed or 0, self.low_noise).generate()
        return load_csv(Path(str(self.path)))

    def describe(self) -> str:
        """Short human-readable description."""
        if self.generator is not None:
            return f"{self.generator} (seed {self.seed or 0})"
        return str(self.path)


class LayerRecord(BaseModel):
    """Kernel parameters of one layer and the noise of its level."""

    model_config = ConfigDict(extra="forbid")

    family: KernelFamily
    variance: PositiveFloat
    lengthscale: PositiveFloat
    noise_variance: NonNegativeFloat


class NormalizerRecord(BaseModel):
    """Scaling applied before training."""

    model_config = ConfigDict(extra="forbid")

    x_offset: list[float]
    x_scale: list[float]
    y_shift: list[float]
    y_scale: list[float]


class DatasetRecord(BaseModel):
    """The dataset a model was trained on."""

    model_config = ConfigDict(extra="forbid")

    source: DatasetSource
    fingerprint: str
    counts: list[int]
    dim: int


class MomentsRecord(BaseModel):
    """Sizes of the sets each stage conditions on and hands to the next stage."""

    model_config = ConfigDict(extra="forbid")

    conditioning_points: list[int]
    evaluation_points: list[int]


class TrainingRecord(BaseModel):
    """Settings that produced the model."""

    model_config = ConfigDict(extra="forbid")

    optimizer: str
    max_iters: int
    restarts: int
    init_strategy: str
    convergence_tol: float
    seed: int
    learn_noise: bool
    normalize: bool


class ModelArtifact(BaseModel):
    """A trained model with everything needed to predict and to check the data it needs.

    Hyperparameters are in the normalized units recorded in `normalizer`.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    spec: str
    mode: TrainMode
    layers: list[LayerRecord]
    lml: float
    stage_lml: list[float]
    trace_length: int
    normalizer: NormalizerRecord
    dataset: DatasetRecord
    moments: MomentsRecord
    training: TrainingRecord

    @classmethod
    def from_result(
        cls, result: TrainResult, data: FidelityDataset, source: DatasetSource, cfg: TrainConfig
    ) -> "ModelArtifact":
        """Describe a training result."""
        counts = [len(level) for level in data]
        norm = result.normalizer
        return cls(
            spec=str(result.spec),
            mode=result.mode,
            layers=[
                LayerRecord(
                    family=family,
                    variance=layer.variance,
                    lengthscale=layer.lengthscale,
                    noise_variance=noise,
                )
                for family, layer, noise in zip(
                    result.spec.families,
                    result.hyperparams.layers,
                    result.hyperparams.noise,
                    strict=True,
                )
            ],
            lml=result.lml,
            stage_lml=list(result.stage_lml),
            trace_length=len(result.trace),
            normalizer=NormalizerRecord(
                x_offset=list(norm.x_offset),
                x_scale=list(norm.x_scale),
                y_shift=list(norm.y_shift),
                y_scale=list(norm.y_scale),
            ),
            dataset=DatasetRecord(
                source=source, fingerprint=data.fingerprint(), counts=counts, dim=data.dim
            ),
            moments=MomentsRecord(
                conditioning_points=counts[:-1],
                evaluation_points=[sum(counts[s + 1 :]) for s in range(len(counts) - 1)],
            ),
            training=TrainingRecord(
                optimizer=cfg.optimizer.value,
                max_iters=cfg.max_iters,
                restarts=cfg.restarts,
                init_strategy=cfg.init_strategy.value,
                convergence_tol=cfg.convergence_tol,
                seed=cfg.seed,
                learn_noise=cfg.learn_noise,
                normalize=cfg.normalize,
            ),
        )

    def to_result(self) -> TrainResult:
        """Rebuild the training result; the trace keeps only its length.

        Raises:
            ArtifactError: If the recorded composition or parameters cannot make a model.
        """
        try:
            spec = CompositionSpec.parse(self.spec)
            hyperparams = Hyperparams(
                layers=tuple(LayerParams(r.variance, r.lengthscale) for r in self.layers),
                noise=tuple(r.noise_variance for r in self.layers),
            )
        except InputError as e:
            msg = f"model file holds an unusable model: {e}"
            raise ArtifactError(msg) from e
        families = tuple(layer.family for layer in self.layers)
        if families != spec.families:
            msg = f"layer families {[f.value for f in families]} do not match {self.spec}"
            raise ArtifactError(msg)
        return TrainResult(
            spec=spec,
            mode=self.mode,
            hyperparams=hyperparams,
            lml=self.lml,
            trace=(),
            normalizer=Normalizer(
                x_offset=tuple(self.normalizer.x_offset),
                x_scale=tuple(self.normalizer.x_scale),
                y_shift=tuple(self.normalizer.y_shift),
                y_scale=tuple(self.normalizer.y_scale),
            ),
            stage_lml=tuple(self.stage_lml),
        )

    def check_data(self, data: FidelityDataset) -> None:
        """Raise unless `data` is the dataset the model was trained on.

        Raises:
            ArtifactError: If the fingerprints differ.
        """
        actual = data.fingerprint()
        if actual != self.dataset.fingerprint:
            msg = (
                f"dataset fingerprint {actual[:12]} does not match the model's "
                f"{self.dataset.fingerprint[:12]}"
            )
            raise ArtifactError(msg)

    def save(self, path: Path) -> None:
        """Write the model as indented JSON."""
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "ModelArtifact":
        """Read a model file.

        Raises:
            ArtifactError: If the file is missing or is not a valid model file.
        """
        if not path.is_file():
            msg = f"model file not found: {path}"
            raise ArtifactError(msg)
        try:
            return cls.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'file'}: {err['msg']}"
                for err in e.errors()
            )
            msg = f"invalid model file {path}: {problems}"
            raise ArtifactError(msg) from e
