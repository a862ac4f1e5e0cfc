"""
Long-running checks on the separable synthetic corpus; run with `pytest -m slow`.
"""
import numpy as np
import pytest

from human_activity_recognition import (
    MODEL_KINDS,
    InputShape,
    ModelSpec,
    TrainConfig,
    build,
    embed,
    load_experiment_config,
    run_experiment,
    train,
)

pytestmark = pytest.mark.slow

SANITY_FLOOR = 0.95


def test_every_kind_clears_the_sanity_floor(write_experiment):
    filename = write_experiment(
        dataset={"synthetic": {"classes": 6, "users": 6, "channels": 3, "length": 400, "seed": 7}},
        preprocess={"window_size": 32, "overlap_fraction": 0.5, "smoothing_window": 3},
        features={"cwt_scales": 8},
        training={"epochs_ce": 30, "batch_size": 32, "learning_rate": 0.003, "seed": 0},
        models=list(MODEL_KINDS),
    )
    report = run_experiment(load_experiment_config(filename))

    assert [result.status for result in report.models] == ["ok"] * len(MODEL_KINDS)

    for result in report.models:
        assert result.test_accuracy >= SANITY_FLOOR, result.kind


def test_contrastive_pretraining_groups_classes(tiny_data):
    store, split = tiny_data
    spec = ModelSpec(
        kind="lstm",
        hyperparameters={"hidden": 8, "head": [16, 8]},
        num_classes=3,
        input_shape=InputShape(window_size=store.window_size, channels=store.num_channels, scales=store.num_scales),
    )
    config = TrainConfig(
        epochs_pretrain=15,
        epochs_ce=1,
        batch_size=18,
        learning_rate=0.01,
        temperature=0.5,
        schedule="supcon",
        seed=3,
    )
    model = train(build(spec, seed=3), store, split, config).model

    embeddings = embed(model, store.batch(split.test, ["temporal"]), normalize=True)
    labels = store.labels(split.test)
    cosine = embeddings @ embeddings.T
    same = labels[:, None] == labels[None, :]
    off_diagonal = ~np.eye(len(labels), dtype=bool)

    assert cosine[same & off_diagonal].mean() > cosine[~same].mean()
