from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial.distance import cdist

from .classical_classifier import ClassicalClassifier, register_classifier

QUERY_CHUNK = 1024


@register_classifier("knn")
class KNNClassifier(ClassicalClassifier):
    """
    k-nearest neighbours under Euclidean distance, majority vote.
    Vote ties go to the tied class holding the nearest neighbour.
    """

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        self.features = features.copy()
        self.labels = labels.copy()

    @property
    def k(self) -> int:
        return min(int(self.hyperparameters["k"]), len(self.labels))

    def neighbours(self, features: np.ndarray) -> np.ndarray:
        """Training indices of the k nearest neighbours of every query, nearest first."""
        features = np.asarray(features, dtype=np.float64)
        chunks = [features[start:start + QUERY_CHUNK] for start in range(0, len(features), QUERY_CHUNK)]
        workers = max(1, int(self.hyperparameters.get("workers", 1)))

        if workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                parts = list(executor.map(self._chunk_neighbours, chunks))
        else:
            parts = [self._chunk_neighbours(chunk) for chunk in chunks]

        return np.concatenate(parts, axis=0) if parts else np.zeros((0, self.k), dtype=np.int64)

    def _chunk_neighbours(self, queries: np.ndarray) -> np.ndarray:
        distances = cdist(queries, self.features, metric="euclidean")
        # stable sort keeps equal distances in training order
        return np.argsort(distances, axis=1, kind="stable")[:, :self.k]

    def _votes(self, features: np.ndarray):
        neighbours = self.neighbours(features)
        neighbour_labels = self.labels[neighbours]
        votes = np.zeros((len(features), self.num_classes))

        for column in range(neighbour_labels.shape[1]):
            votes[np.arange(len(features)), neighbour_labels[:, column]] += 1.0

        return votes, neighbour_labels

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        votes, _ = self._votes(features)

        return votes / votes.sum(axis=1, keepdims=True)

    def predict(self, features: np.ndarray) -> np.ndarray:
        votes, neighbour_labels = self._votes(np.asarray(features, dtype=np.float64))
        winners = votes.max(axis=1, keepdims=True)
        tied = votes == winners
        predictions = votes.argmax(axis=1)

        for row in np.flatnonzero(tied.sum(axis=1) > 1):
            # nearest neighbour whose class is among the tied
            predictions[row] = next(label for label in neighbour_labels[row] if tied[row, label])

        return predictions

    def state(self) -> dict:
        return {"features": self.features.tolist(), "labels": self.labels.tolist()}

    def load_state(self, state: dict) -> None:
        self.features = np.array(state["features"], dtype=np.float64)
        self.labels = np.array(state["labels"], dtype=np.int64)
