import logging
from typing import Dict, Type

import numpy as np

from .exceptions import LabelOutOfRange, ShapeMismatch, SingleClassTrainingSet

logger = logging.getLogger(__name__)

CLASSICAL_CLASSIFIERS: Dict[str, Type["ClassicalClassifier"]] = {}


def register_classifier(kind: str):
    def decorator(cls):
        cls.kind = kind
        CLASSICAL_CLASSIFIERS[kind] = cls
        return cls

    return decorator


def check_training_set(features: np.ndarray, labels: np.ndarray, num_classes: int):
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)

    if features.ndim != 2 or labels.ndim != 1 or features.shape[0] != labels.shape[0]:
        raise ShapeMismatch(f"features {features.shape} and labels {labels.shape} do not describe the same items")

    if not np.isfinite(features).all():
        raise ValueError("training features contain non-finite values")

    if labels.size > 0 and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelOutOfRange(f"labels must lie in [0, {num_classes}), got range [{labels.min()}, {labels.max()}]")

    if len(np.unique(labels)) < 2:
        raise SingleClassTrainingSet(f"training set of {len(labels)} items holds a single class")

    if len(labels) < num_classes:
        raise ValueError(f"{len(labels)} training items cannot cover {num_classes} classes")

    return features, labels


class ClassicalClassifier:
    """
    fit / predict_proba over statistical feature vectors [N x 4C].
    Subclasses keep their fitted state JSON-serializable through `state` / `load_state`.
    """
    kind = None

    def __init__(self, hyperparameters: dict, num_classes: int, seed: int = 0):
        self.hyperparameters = dict(hyperparameters)
        self.num_classes = num_classes
        self.seed = seed
        self.fitted = False

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind!r}, num_classes={self.num_classes}, fitted={self.fitted})"

    def num_parameters(self) -> int:
        return 0

    def fit(self, features: np.ndarray, labels: np.ndarray) -> "ClassicalClassifier":
        features, labels = check_training_set(features, labels, self.num_classes)
        self._fit(features, labels)
        self.fitted = True

        return self

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        raise NotImplementedError

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        if not self.fitted:
            raise RuntimeError(f"{self.kind} classifier has not been fitted")

        return self._predict_proba(np.asarray(features, dtype=np.float64))

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.predict_proba(features).argmax(axis=1)

    def state(self) -> dict:
        raise NotImplementedError

    def load_state(self, state: dict) -> None:
        raise NotImplementedError
