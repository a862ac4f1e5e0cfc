import pytest
import yaml

from human_activity_recognition import (
    FeatureConfig,
    FeatureStore,
    PreprocessConfig,
    SynthSpec,
    preprocess_pipeline,
    segment_recordings,
    stratified_split,
    synth_generate,
)


@pytest.fixture(scope="session")
def tiny_data():
    """Three synthetic classes, 126 segments of 16 x 3 samples, split 70/10/20."""
    recordings = synth_generate(SynthSpec(classes=3, users=3, channels=3, length=120, seed=7))
    config = PreprocessConfig(window_size=16, overlap_fraction=0.5, smoothing_window=3)
    split = stratified_split(segment_recordings(recordings, config), seed=0)
    segments, _ = preprocess_pipeline(recordings, config, train_ids=split.train)
    store = FeatureStore(segments, FeatureConfig(cwt_scales=4))

    return store, split


def tiny_experiment_document(output_directory, **changes):
    document = {
        "name": "tiny",
        "dataset": {"synthetic": {"classes": 3, "users": 3, "channels": 3, "length": 120, "seed": 7}},
        "preprocess": {"window_size": 16, "overlap_fraction": 0.5, "smoothing_window": 3},
        "features": {"cwt_scales": 4},
        "split": {"strategy": "segment_stratified", "seed": 0},
        "training": {"epochs_ce": 2, "epochs_pretrain": 1, "batch_size": 16, "learning_rate": 0.01, "seed": 0},
        "models": [
            "knn",
            "gaussian_nb",
            {"kind": "lstm", "hyperparameters": {"hidden": 4, "head": [8, 4]}},
        ],
        "output_directory": str(output_directory),
        "workers": 1,
    }
    document.update(changes)

    return document


@pytest.fixture
def write_experiment(tmp_path):
    """Factory writing a tiny synthetic experiment document; keyword arguments replace top-level keys."""
    def write(filename="experiment.yaml", **changes):
        path = tmp_path / filename
        path.write_text(yaml.safe_dump(tiny_experiment_document(tmp_path / "output", **changes)))

        return str(path)

    return write


@pytest.fixture(scope="session")
def six_class_data():
    """Six synthetic classes on three channels, 198 segments of 32 samples."""
    recordings = synth_generate(SynthSpec(classes=6, users=3, channels=3, length=200, seed=7))
    config = PreprocessConfig(window_size=32, overlap_fraction=0.5, smoothing_window=3)
    split = stratified_split(segment_recordings(recordings, config), seed=0)
    segments, _ = preprocess_pipeline(recordings, config, train_ids=split.train)
    store = FeatureStore(segments, FeatureConfig(cwt_scales=4))

    return store, split
