from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class ClassifierOutput:
    """
    Batched outputs: logits and probabilities [N x Z], penultimate embedding [N x 128] for neural models.
    `predicted` overrides the argmax when a classifier breaks probability ties itself (KNN).
    """
    logits: np.ndarray
    probabilities: np.ndarray
    embedding: Optional[np.ndarray] = None
    predicted: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.logits.shape[0]

    @property
    def predictions(self) -> np.ndarray:
        if self.predicted is not None:
            return self.predicted

        return self.probabilities.argmax(axis=1)

    def item(self, index: int) -> "ClassifierOutput":
        return ClassifierOutput(
            logits=self.logits[index],
            probabilities=self.probabilities[index],
            embedding=None if self.embedding is None else self.embedding[index],
            predicted=None if self.predicted is None else self.predicted[index],
        )
