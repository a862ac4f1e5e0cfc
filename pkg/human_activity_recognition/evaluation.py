from typing import Sequence, Tuple

import numpy as np

from .model_zoo import Model, forward

EVALUATION_BATCH = 512


def predict_ids(model: Model, store, ids: Sequence[int], batch_size: int = EVALUATION_BATCH) -> Tuple[np.ndarray, np.ndarray]:
    """
    Predictions and true labels for `ids`, materializing features `batch_size` segments at a time.
    """
    ids = list(ids)
    representations = model.spec.input_features if hasattr(model, "spec") else ("statistical",)
    predictions = []

    for start in range(0, len(ids), batch_size):
        batch = store.batch(ids[start:start + batch_size], representations)
        predictions.append(forward(model, batch).predictions)

    if not predictions:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)

    return np.concatenate(predictions).astype(np.int64), store.labels(ids)


def accuracy_on(model: Model, store, ids: Sequence[int]) -> float:
    if len(ids) == 0:
        return float("nan")

    predictions, labels = predict_ids(model, store, ids)

    return float(np.mean(predictions == labels))
