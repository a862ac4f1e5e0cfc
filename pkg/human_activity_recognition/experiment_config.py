import logging
from dataclasses import asdict, dataclass, field
from os.path import abspath, dirname, exists, expanduser, isabs, join
from typing import List, Optional, Sequence, Tuple

import colored_logging as cl
import yaml

from .constants import DEFAULT_OUTPUT_DIRECTORY, DEFAULT_SEED, SPLIT_RATIOS, SPLIT_STRATEGIES
from .digests import config_digest
from .exceptions import ConfigError
from .feature_config import FeatureConfig
from .model_spec import ModelSpec
from .preprocess_config import PreprocessConfig
from .synthetic_corpus import SynthSpec
from .train_config import TrainConfig

logger = logging.getLogger(__name__)

# command-line spellings of the split strategies
SPLIT_ALIASES = {
    "stratified": "segment_stratified",
    "segment-stratified": "segment_stratified",
    "by-user": "by_user",
}

EXPERIMENT_KEYS = {
    "name", "dataset", "preprocess", "features", "models", "training", "split",
    "output_directory", "cache_directory", "workers",
}


def resolve_split_strategy(strategy: str) -> str:
    strategy = str(strategy).strip().lower()
    strategy = SPLIT_ALIASES.get(strategy, strategy)

    if strategy not in SPLIT_STRATEGIES:
        raise ConfigError(f"split strategy must be one of {SPLIT_STRATEGIES}, got '{strategy}'")

    return strategy


def _resolve_path(path: Optional[str], base_directory: str) -> Optional[str]:
    if path is None:
        return None

    path = expanduser(str(path))

    return path if isabs(path) else abspath(join(base_directory, path))


@dataclass
class DatasetSource:
    """
    Either a manifest document or an inline synthetic corpus.
    `published_dataset` ("DS1" or "DS2") selects the published column shown next to results.
    """
    manifest: Optional[str] = None
    synthetic: Optional[SynthSpec] = None
    published_dataset: Optional[str] = None

    def validate(self) -> "DatasetSource":
        if (self.manifest is None) == (self.synthetic is None):
            raise ConfigError("dataset must name exactly one of 'manifest' or 'synthetic'")

        if self.manifest is not None and not exists(self.manifest):
            raise ConfigError(f"dataset manifest not found: {self.manifest}")

        if self.synthetic is not None:
            self.synthetic.validate()

        if self.published_dataset not in (None, "DS1", "DS2"):
            raise ConfigError(f"published dataset must be DS1 or DS2, got '{self.published_dataset}'")

        return self

    @classmethod
    def from_dict(cls, document: dict, base_directory: str = ".") -> "DatasetSource":
        unknown = set(document) - {"manifest", "synthetic", "published_dataset"}

        if unknown:
            raise ConfigError(f"unknown dataset keys: {sorted(unknown)}")

        synthetic = document.get("synthetic")

        return cls(
            manifest=_resolve_path(document.get("manifest"), base_directory),
            synthetic=None if synthetic is None else SynthSpec.from_dict(dict(synthetic)),
            published_dataset=document.get("published_dataset"),
        )


@dataclass
class SplitConfig:
    strategy: str = "segment_stratified"
    seed: int = DEFAULT_SEED
    ratios: Tuple[float, float, float] = SPLIT_RATIOS

    def __post_init__(self):
        self.strategy = resolve_split_strategy(self.strategy)
        self.ratios = tuple(float(ratio) for ratio in self.ratios)

    @classmethod
    def from_dict(cls, document: dict) -> "SplitConfig":
        unknown = set(document) - set(cls.__dataclass_fields__)

        if unknown:
            raise ConfigError(f"unknown split keys: {sorted(unknown)}")

        return cls(**document)


@dataclass
class ExperimentConfig:
    dataset: DatasetSource
    models: List[ModelSpec]
    name: str = "experiment"
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    output_directory: str = DEFAULT_OUTPUT_DIRECTORY
    cache_directory: Optional[str] = None
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        """
        Raises:
            ConfigError: for an empty model list, a missing manifest or an invalid section.
        """
        if len(self.models) == 0:
            raise ConfigError("experiment lists no models")

        kinds = [spec.kind for spec in self.models]
        duplicated = sorted({kind for kind in kinds if kinds.count(kind) > 1})

        if duplicated:
            raise ConfigError(f"models listed more than once: {duplicated}")

        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")

        self.dataset.validate()
        self.preprocess.validate()
        self.features.validate()
        self.training.validate()

        return self

    @property
    def seed(self) -> int:
        return self.training.seed

    def sections(self) -> dict:
        """Provenance sections; run-specific seeds and output locations are left out."""
        training = asdict(self.training)
        training.pop("seed")

        return {
            "dataset": {
                "manifest": self.dataset.manifest,
                "synthetic": self.dataset.synthetic,
                "published_dataset": self.dataset.published_dataset,
            },
            "preprocess": self.preprocess,
            "features": self.features,
            "split": {"strategy": self.split.strategy, "ratios": list(self.split.ratios)},
            "training": training,
            "models": [spec.to_dict() for spec in self.models],
        }

    def section_digests(self) -> dict:
        return {name: config_digest(value) for name, value in self.sections().items()}

    @property
    def digest(self) -> str:
        return config_digest({**self.sections(), "seed": self.seed, "split_seed": self.split.seed})

    def with_overrides(
            self,
            seed: Optional[int] = None,
            output_directory: Optional[str] = None,
            models: Optional[Sequence[str]] = None,
            schedule: Optional[str] = None,
            split_strategy: Optional[str] = None) -> "ExperimentConfig":
        """Copy with command-line overrides applied; `seed` sets both the split and the training seed."""
        training = self.training
        split = self.split
        selected = self.models

        if seed is not None:
            training = training.replace(seed=int(seed))
            split = SplitConfig(strategy=split.strategy, seed=int(seed), ratios=split.ratios)

        if schedule is not None:
            training = training.replace(schedule=schedule)

        if split_strategy is not None:
            split = SplitConfig(strategy=split_strategy, seed=split.seed, ratios=split.ratios)

        if models is not None:
            by_kind = {spec.kind: spec for spec in self.models}
            selected = [by_kind.get(kind.strip().lower()) or ModelSpec(kind=kind) for kind in models if kind.strip()]

        return ExperimentConfig(
            dataset=self.dataset,
            models=selected,
            name=self.name,
            preprocess=self.preprocess,
            features=self.features,
            training=training,
            split=split,
            output_directory=self.output_directory if output_directory is None else abspath(expanduser(output_directory)),
            cache_directory=self.cache_directory,
            workers=self.workers,
        ).validate()

    @classmethod
    def from_dict(cls, document: dict, base_directory: str = ".") -> "ExperimentConfig":
        unknown = set(document) - EXPERIMENT_KEYS

        if unknown:
            raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")

        if "dataset" not in document:
            raise ConfigError("experiment is missing its dataset")

        return cls(
            dataset=DatasetSource.from_dict(dict(document["dataset"]), base_directory),
            models=[ModelSpec.from_dict(entry) for entry in document.get("models") or []],
            name=document.get("name", "experiment"),
            preprocess=PreprocessConfig.from_dict(dict(document.get("preprocess") or {})),
            features=FeatureConfig.from_dict(dict(document.get("features") or {})),
            training=TrainConfig.from_dict(dict(document.get("training") or {})),
            split=SplitConfig.from_dict(dict(document.get("split") or {})),
            output_directory=_resolve_path(document.get("output_directory", DEFAULT_OUTPUT_DIRECTORY), base_directory),
            cache_directory=_resolve_path(document.get("cache_directory"), base_directory),
            workers=int(document.get("workers", 1)),
        ).validate()


def load_experiment_config(filename: str) -> ExperimentConfig:
    """
    Read a YAML experiment document; relative paths resolve against its directory.

    Raises:
        ConfigError: if the document cannot be read or fails validation.
    """
    filename = abspath(expanduser(filename))

    try:
        with open(filename, "r", encoding="utf-8") as file:
            document = yaml.safe_load(file)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"unable to read experiment config {filename}: {e}") from e

    if not isinstance(document, dict):
        raise ConfigError(f"experiment config {filename} is not a key/value document")

    config = ExperimentConfig.from_dict(document, base_directory=dirname(filename))
    logger.info(
        f"loaded experiment {cl.name(config.name)} with {cl.val(len(config.models))} models "
        f"from {cl.dir(filename)}"
    )

    return config
