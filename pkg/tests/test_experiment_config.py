from os.path import abspath, dirname, join

import pytest
import yaml

from human_activity_recognition import (
    ConfigError,
    ExperimentConfig,
    UnknownModelKind,
    load_experiment_config,
    resolve_split_strategy,
)

CONFIGS_DIRECTORY = abspath(join(dirname(__file__), "..", "configs"))


def write_document(directory, document, filename="experiment.yaml"):
    path = directory / filename
    path.write_text(yaml.safe_dump(document))

    return str(path)


def minimal_document(**changes):
    document = {
        "name": "unit",
        "dataset": {"synthetic": {"classes": 3, "users": 3, "channels": 3, "length": 120}},
        "models": ["knn", {"kind": "lstm", "hyperparameters": {"hidden": 4}}],
    }
    document.update(changes)

    return document


def test_shipped_synthetic_experiment_loads():
    config = load_experiment_config(join(CONFIGS_DIRECTORY, "synthetic_experiment.yaml"))

    assert config.name == "synthetic"
    assert [spec.kind for spec in config.models] == ["knn", "rf", "gaussian_nb", "lr", "lstm", "cnn1d"]
    assert config.preprocess.window_size == 32
    assert config.features.cwt_scales == 8
    assert config.workers == 2
    assert config.output_directory == join(CONFIGS_DIRECTORY, "output")


def test_shipped_wisdm_experiment_resolves_its_manifest():
    config = load_experiment_config(join(CONFIGS_DIRECTORY, "wisdm_experiment.yaml"))

    assert config.dataset.manifest == join(CONFIGS_DIRECTORY, "wisdm_manifest.yaml")
    assert config.dataset.published_dataset == "DS1"


def test_relative_paths_follow_the_document(tmp_path):
    filename = write_document(tmp_path, minimal_document(output_directory="runs", cache_directory="cache"))
    config = load_experiment_config(filename)

    assert config.output_directory == str(tmp_path / "runs")
    assert config.cache_directory == str(tmp_path / "cache")


def test_split_aliases():
    assert resolve_split_strategy("stratified") == "segment_stratified"
    assert resolve_split_strategy("By-User") == "by_user"

    with pytest.raises(ConfigError):
        resolve_split_strategy("random")


@pytest.mark.parametrize("changes", [
    {"models": []},
    {"models": ["knn", "KNN"]},
    {"workers": 0},
    {"unexpected": 1},
    {"dataset": {}},
    {"dataset": {"manifest": "absent.yaml"}},
    {"dataset": {"synthetic": {"classes": 3}, "published_dataset": "DS3"}},
    {"split": {"strategy": "random"}},
    {"training": {"epochs_ce": 0}},
])
def test_invalid_documents(tmp_path, changes):
    with pytest.raises(ConfigError):
        load_experiment_config(write_document(tmp_path, minimal_document(**changes)))


def test_unknown_model_kind(tmp_path):
    with pytest.raises(UnknownModelKind):
        load_experiment_config(write_document(tmp_path, minimal_document(models=["svm", "xgboost"])))


def test_unreadable_documents(tmp_path):
    with pytest.raises(ConfigError):
        load_experiment_config(str(tmp_path / "absent.yaml"))

    (tmp_path / "list.yaml").write_text("- knn\n- rf\n")

    with pytest.raises(ConfigError):
        load_experiment_config(str(tmp_path / "list.yaml"))


def test_overrides(tmp_path):
    config = ExperimentConfig.from_dict(minimal_document(), base_directory=str(tmp_path))
    overridden = config.with_overrides(
        seed=3,
        output_directory=str(tmp_path / "elsewhere"),
        models=["LSTM", "rf"],
        schedule="supcon",
        split_strategy="by-user",
    )

    assert overridden.seed == 3
    assert overridden.split.seed == 3
    assert overridden.training.schedule == "supcon_then_ce"
    assert overridden.split.strategy == "by_user"
    assert overridden.output_directory == str(tmp_path / "elsewhere")
    assert [spec.kind for spec in overridden.models] == ["lstm", "rf"]
    assert overridden.models[0].hyperparameters["hidden"] == 4

    assert config.seed == 0
    assert [spec.kind for spec in config.models] == ["knn", "lstm"]


def test_section_digests_leave_out_seeds(tmp_path):
    config = ExperimentConfig.from_dict(minimal_document(), base_directory=str(tmp_path))
    reseeded = config.with_overrides(seed=11)

    assert reseeded.section_digests() == config.section_digests()
    assert reseeded.digest != config.digest

    narrower = ExperimentConfig.from_dict(
        minimal_document(preprocess={"window_size": 16}), base_directory=str(tmp_path)
    )
    changed = {
        name for name, digest in narrower.section_digests().items()
        if config.section_digests()[name] != digest
    }

    assert changed == {"preprocess"}
    assert config.digest == ExperimentConfig.from_dict(minimal_document(), base_directory=str(tmp_path)).digest
