import threading

import numpy as np
import pytest

from human_activity_recognition import InfeasibleSampling, prefetch, sample_batches


def labeled_ids(per_class=20, classes=6):
    ids = np.arange(per_class * classes) + 1000
    labels = np.repeat(np.arange(classes), per_class)

    return ids, labels


def test_plain_batches_cover_the_ids_once():
    ids = np.arange(100)
    batches = sample_batches(ids, np.zeros(100, dtype=int), "plain", 64, seed=0)

    assert [len(batch) for batch in batches] == [64, 36]
    assert sorted(np.concatenate(batches).tolist()) == ids.tolist()


def test_batches_are_deterministic_and_read_only():
    ids, labels = labeled_ids()
    first = sample_batches(ids, labels, "plain", 16, seed=3)
    second = sample_batches(ids, labels, "plain", 16, seed=3)
    other = sample_batches(ids, labels, "plain", 16, seed=4)

    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    assert not all(np.array_equal(a, b) for a, b in zip(first, other))

    with pytest.raises(ValueError):
        first[0][0] = -1


def test_class_balanced_batches():
    ids, labels = labeled_ids()
    label_of = dict(zip(ids.tolist(), labels.tolist()))
    batches = sample_batches(ids, labels, "class_balanced", 60, seed=0)

    assert len(batches) == 2

    for batch in batches:
        counts = np.bincount([label_of[item] for item in batch.tolist()], minlength=6)
        assert counts.tolist() == [10] * 6


def test_class_balanced_needs_two_per_class():
    ids, labels = labeled_ids()

    with pytest.raises(InfeasibleSampling):
        sample_batches(ids, labels, "class_balanced", 6, seed=0)

    with pytest.raises(InfeasibleSampling):
        sample_batches([1, 2, 3], [0, 0, 1], "class_balanced", 8, seed=0)


def test_triplet_rows_respect_labels():
    ids, labels = labeled_ids(per_class=5, classes=3)
    label_of = dict(zip(ids.tolist(), labels.tolist()))
    batches = sample_batches(ids, labels, "triplet", 4, seed=1)

    assert sum(len(batch) for batch in batches) == 15

    for batch in batches:
        assert batch.shape[1] == 3

        for anchor, positive, negative in batch.tolist():
            assert anchor != positive
            assert label_of[anchor] == label_of[positive]
            assert label_of[anchor] != label_of[negative]


def test_triplet_needs_two_classes():
    with pytest.raises(InfeasibleSampling):
        sample_batches([1, 2, 3], [0, 0, 0], "triplet", 2, seed=0)

    with pytest.raises(InfeasibleSampling):
        sample_batches([1, 2, 3], [0, 1, 2], "triplet", 2, seed=0)


def test_triplet_needs_two_classes_with_two_items_each():
    with pytest.raises(InfeasibleSampling, match="two classes with at least two items"):
        sample_batches([1, 2, 3], [0, 0, 1], "triplet", 2, seed=0)

    batches = sample_batches([1, 2, 3, 4, 5], [0, 0, 1, 1, 2], "triplet", 5, seed=0)
    assert sum(len(batch) for batch in batches) == 5


def test_empty_and_unknown_mode():
    with pytest.raises(InfeasibleSampling):
        sample_batches([], [], "plain", 4)

    with pytest.raises(InfeasibleSampling):
        sample_batches([1, 2], [0, 1], "hard_negative", 4)


def test_prefetch_preserves_order():
    items = [np.array([index]) for index in range(10)]

    assert [item[0] for item in prefetch(iter(items), capacity=2)] == list(range(10))
    assert [item[0] for item in prefetch(iter(items), capacity=0)] == list(range(10))


def test_prefetch_reraises_producer_errors():
    def failing():
        yield 1
        raise RuntimeError("producer failed")

    with pytest.raises(RuntimeError, match="producer failed"):
        list(prefetch(failing(), capacity=1))


def test_prefetch_producer_exits_when_the_consumer_stops_early():
    items = [np.array([index]) for index in range(100)]
    stream = prefetch(iter(items), capacity=1)

    assert next(stream)[0] == 0
    stream.close()

    assert not any(thread.name == "batch-prefetch" and thread.is_alive() for thread in threading.enumerate())
