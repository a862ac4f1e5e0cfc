"""
Batch streams over a labeled id set.

plain           shuffled fixed-size batches, the last one short
class_balanced  equal draws from every class per batch, so every item has a same-label partner
triplet         (anchor, positive, negative) id rows; positive shares the anchor's label, negative does not

Emitted arrays are read-only.
"""
import logging
import queue
import threading
from typing import Iterable, Iterator, List

import numpy as np

from .constants import PREFETCH_CAPACITY, PREFETCH_POLL_SECONDS, SAMPLING_MODES
from .exceptions import InfeasibleSampling

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def _check(ids, labels):
    ids = np.asarray(ids, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)

    if ids.shape != labels.shape or ids.ndim != 1:
        raise InfeasibleSampling(f"ids {ids.shape} and labels {labels.shape} must be matching vectors")

    if len(ids) == 0:
        raise InfeasibleSampling("cannot sample batches from an empty id set")

    return ids, labels


def plain_batches(ids, batch_size: int, rng: np.random.Generator) -> List[np.ndarray]:
    ids = np.asarray(ids, dtype=np.int64)
    order = ids[rng.permutation(len(ids))]

    return [_frozen(order[start:start + batch_size].copy()) for start in range(0, len(order), batch_size)]


def class_balanced_batches(ids, labels, batch_size: int, rng: np.random.Generator) -> List[np.ndarray]:
    """
    ceil(N / batch_size) batches of batch_size // Z items per class, each class drawn from its
    own shuffled pool that is reshuffled when exhausted.
    """
    ids, labels = _check(ids, labels)
    classes = np.unique(labels)
    per_class = batch_size // len(classes)

    if per_class < 2:
        raise InfeasibleSampling(f"batch size {batch_size} cannot hold two items of each of {len(classes)} classes")

    pools = {label: ids[labels == label] for label in classes}
    small = [int(label) for label, pool in pools.items() if len(pool) < 2]

    if small:
        raise InfeasibleSampling(f"classes {small} have fewer than two items")

    queues = {label: [] for label in classes}
    batches = []

    for _ in range(int(np.ceil(len(ids) / batch_size))):
        batch = []

        for label in classes:
            while len(queues[label]) < per_class:
                queues[label].extend(pools[label][rng.permutation(len(pools[label]))].tolist())

            batch.extend(queues[label][:per_class])
            del queues[label][:per_class]

        batches.append(_frozen(np.array(batch, dtype=np.int64)[rng.permutation(len(batch))]))

    return batches


def triplet_batches(ids, labels, batch_size: int, rng: np.random.Generator) -> List[np.ndarray]:
    """ceil(N / batch_size) batches of [b x 3] (anchor, positive, negative) id rows."""
    ids, labels = _check(ids, labels)
    classes, counts = np.unique(labels, return_counts=True)
    eligible_classes = classes[counts >= 2]

    if len(eligible_classes) < 2:
        raise InfeasibleSampling(
            f"triplet sampling needs two classes with at least two items each, got class counts {dict(zip(classes.tolist(), counts.tolist()))}"
        )

    by_class = {label: ids[labels == label] for label in classes}
    negatives = {label: ids[labels != label] for label in classes}
    anchors_pool = ids[np.isin(labels, eligible_classes)]
    anchor_labels = labels[np.isin(labels, eligible_classes)]
    batches = []
    remaining = len(ids)

    while remaining > 0:
        size = min(batch_size, remaining)
        remaining -= size
        rows = np.zeros((size, 3), dtype=np.int64)
        picks = rng.integers(0, len(anchors_pool), size=size)

        for row, pick in enumerate(picks):
            anchor, label = anchors_pool[pick], anchor_labels[pick]
            same = by_class[label]
            positive = same[rng.integers(0, len(same) - 1)]

            # skip over the anchor itself
            if positive == anchor:
                positive = same[-1]

            rows[row] = (anchor, positive, negatives[label][rng.integers(0, len(negatives[label]))])

        batches.append(_frozen(rows))

    return batches


def sample_batches(
        ids,
        labels,
        mode: str = "plain",
        batch_size: int = 64,
        seed: int = 0) -> List[np.ndarray]:
    """
    One epoch of batches in the given sampling mode, deterministic in `seed`.

    Raises:
        InfeasibleSampling: if the id set cannot satisfy the mode's label constraints.
    """
    if mode not in SAMPLING_MODES:
        raise InfeasibleSampling(f"sampling mode must be one of {SAMPLING_MODES}, got '{mode}'")

    rng = np.random.default_rng(seed)

    if mode == "plain":
        _check(ids, labels)
        return plain_batches(ids, batch_size, rng)

    if mode == "class_balanced":
        return class_balanced_batches(ids, labels, batch_size, rng)

    return triplet_batches(ids, labels, batch_size, rng)


_END = object()


def prefetch(batches: Iterable, capacity: int = PREFETCH_CAPACITY) -> Iterator:
    """
    Produce `batches` on a background thread through a bounded queue.
    Exceptions raised by the producer are re-raised in the consumer. Every put is bounded, so the
    producer thread exits once the consumer stops early.
    """
    if capacity < 1:
        yield from batches
        return

    handoff = queue.Queue(maxsize=capacity)
    stop = threading.Event()

    def offer(item) -> bool:
        while not stop.is_set():
            try:
                handoff.put(item, timeout=PREFETCH_POLL_SECONDS)
                return True
            except queue.Full:
                continue

        return False

    def produce():
        try:
            for batch in batches:
                if not offer(batch):
                    return

            offer(_END)
        except Exception as e:
            offer(e)

    producer = threading.Thread(target=produce, name="batch-prefetch", daemon=True)
    producer.start()

    try:
        while True:
            item = handoff.get()

            if item is _END:
                break

            if isinstance(item, Exception):
                raise item

            yield item
    finally:
        stop.set()
        producer.join(timeout=1.0)
