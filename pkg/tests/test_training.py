import numpy as np
import pandas as pd
import pytest

from human_activity_recognition import (
    ConfigError,
    InputShape,
    ModelSpec,
    SplitAssignment,
    SplitLeakage,
    TrainConfig,
    TrainingDiverged,
    UnsupportedOperation,
    accuracy_on,
    build,
    check_batch_ids,
    resolve_schedule,
    train,
)
from human_activity_recognition.training_loop import HISTORY_COLUMNS, write_history

TINY_HEAD = [8, 4]


def tiny_model(kind, store, seed=0):
    hyperparameters = {
        "lstm": {"hidden": 4, "head": TINY_HEAD},
        "cnn1d": {"filters": [4, 3], "head": TINY_HEAD},
        "mrnet": {"lstm_hidden": 3, "dense": 3, "conv_channels": [2, 2], "head": TINY_HEAD},
    }[kind]
    shape = InputShape(window_size=store.window_size, channels=store.num_channels, scales=store.num_scales)

    return build(ModelSpec(kind=kind, hyperparameters=hyperparameters, num_classes=3, input_shape=shape), seed=seed)


def test_schedule_aliases():
    assert resolve_schedule("CE") == "ce_only"
    assert resolve_schedule("supcon") == "supcon_then_ce"
    assert resolve_schedule("triplet_then_ce") == "triplet_then_ce"

    with pytest.raises(ConfigError):
        resolve_schedule("mixup")


@pytest.mark.parametrize("changes", [
    {"temperature": 0.0},
    {"triplet_margin": -1.0},
    {"epochs_ce": 0},
    {"batch_size": 1},
    {"learning_rate": 0.0},
])
def test_invalid_train_config(changes):
    with pytest.raises(ConfigError):
        TrainConfig(**changes).validate()


def test_cross_entropy_training_keeps_the_best_epoch(tiny_data, tmp_path):
    store, split = tiny_data
    model = tiny_model("cnn1d", store)
    config = TrainConfig(epochs_ce=3, batch_size=16, learning_rate=0.01, seed=1)
    result = train(model, store, split, config, history_filename=str(tmp_path / "history.csv"))

    history = result.history
    assert history.columns.tolist() == HISTORY_COLUMNS
    assert history["phase"].tolist() == ["ce"] * 3
    assert history["epoch"].tolist() == [1, 2, 3]
    assert np.all(np.isfinite(history["train_loss"]))

    assert result.best_val_accuracy == history["val_accuracy"].max()
    assert result.best_epoch == int(history["epoch"][history["val_accuracy"].idxmax()])
    assert accuracy_on(result.model, store, split.val) == result.best_val_accuracy
    assert set(result.durations) == {"ce"}

    written = pd.read_csv(tmp_path / "history.csv")
    assert written["epoch"].tolist() == [1, 2, 3]


def test_training_is_deterministic(tiny_data):
    store, split = tiny_data
    config = TrainConfig(epochs_ce=2, batch_size=16, learning_rate=0.01, seed=5)
    first = train(tiny_model("lstm", store, seed=2), store, split, config)
    second = train(tiny_model("lstm", store, seed=2), store, split, config)

    assert first.history["train_loss"].tolist() == second.history["train_loss"].tolist()

    for (_, a), (_, b) in zip(first.model.named_parameters(), second.model.named_parameters()):
        np.testing.assert_array_equal(a.values, b.values)


@pytest.mark.parametrize("schedule", ["supcon", "triplet"])
def test_pretraining_schedules(tiny_data, schedule):
    store, split = tiny_data
    config = TrainConfig(epochs_ce=2, epochs_pretrain=2, batch_size=18, learning_rate=0.01, schedule=schedule, temperature=0.5)
    result = train(tiny_model("cnn1d", store), store, split, config)

    assert result.history["phase"].tolist() == ["pretrain", "pretrain", "ce", "ce"]
    assert np.all(np.isfinite(result.history["train_loss"]))
    assert set(result.durations) == {"pretrain", "ce"}
    assert result.best_epoch in (1, 2)


def test_multi_representation_model_trains(tiny_data):
    store, split = tiny_data
    result = train(tiny_model("mrnet", store), store, split, TrainConfig(epochs_ce=1, batch_size=32, seed=0))

    assert 0.0 <= result.best_val_accuracy <= 1.0


def test_divergence_names_the_epoch_and_batch(tiny_data):
    store, split = tiny_data
    model = tiny_model("lstm", store)
    model.output.weight.values[...] = np.nan

    with pytest.raises(TrainingDiverged) as error:
        train(model, store, split, TrainConfig(epochs_ce=2, batch_size=16))

    assert error.value.epoch == 1
    assert error.value.batch == 0


def test_overlapping_split_is_rejected(tiny_data):
    store, split = tiny_data
    leaking = SplitAssignment(train=split.train, val=split.val + split.train[:1], test=split.test)

    with pytest.raises(SplitLeakage):
        train(tiny_model("lstm", store), store, leaking, TrainConfig(epochs_ce=1))


def test_batch_ids_outside_training_split():
    check_batch_ids(np.array([1, 2]), {1, 2, 3})

    with pytest.raises(SplitLeakage):
        check_batch_ids(np.array([[1, 2, 99]]), {1, 2, 3})


def test_classical_models_are_not_trained_by_the_loop(tiny_data):
    store, split = tiny_data

    with pytest.raises(UnsupportedOperation):
        train(build(ModelSpec(kind="knn", num_classes=3)), store, split)


def test_write_history(tmp_path):
    history = pd.DataFrame([{"epoch": 1, "phase": "ce", "train_loss": 0.5, "val_accuracy": 0.75}], columns=HISTORY_COLUMNS)
    filename = write_history(history, str(tmp_path / "nested" / "history.csv"))

    assert pd.read_csv(filename).iloc[0].to_dict() == {"epoch": 1, "phase": "ce", "train_loss": 0.5, "val_accuracy": 0.75}
