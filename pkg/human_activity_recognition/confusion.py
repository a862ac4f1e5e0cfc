import logging
from os import makedirs
from os.path import dirname, expanduser
from typing import List, Optional

import colored_logging as cl
import numpy as np
import pandas as pd

from .constants import NUM_CLASSES
from .exceptions import ShapeMismatch

logger = logging.getLogger(__name__)


def confusion_matrix(predictions, labels, num_classes: int = NUM_CLASSES) -> np.ndarray:
    """
    Counts of (true class, predicted class) pairs [Z x Z].

    Raises:
        ShapeMismatch: if predictions and labels differ in length.
    """
    predictions = np.asarray(predictions, dtype=np.int64).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)

    if predictions.shape != labels.shape:
        raise ShapeMismatch(f"{len(predictions)} predictions for {len(labels)} labels")

    for name, values in (("prediction", predictions), ("label", labels)):
        if values.size and (values.min() < 0 or values.max() >= num_classes):
            raise ValueError(f"{name} outside [0, {num_classes}): range [{values.min()}, {values.max()}]")

    matrix = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(matrix, (labels, predictions), 1)

    return matrix


def confusion_accuracy(matrix: np.ndarray) -> float:
    total = int(matrix.sum())

    return float(np.trace(matrix) / total) if total else float("nan")


def confusion_frame(matrix: np.ndarray, class_names: Optional[List[str]] = None) -> pd.DataFrame:
    if class_names is None:
        class_names = [str(index) for index in range(matrix.shape[0])]

    frame = pd.DataFrame(matrix, index=list(class_names), columns=list(class_names))
    frame.index.name = "true \\ predicted"

    return frame


def format_confusion(matrix: np.ndarray, class_names: Optional[List[str]] = None) -> str:
    """Aligned plain-text rendering with class names on both axes."""
    return confusion_frame(matrix, class_names).to_string()


def write_confusion(matrix: np.ndarray, filename: str, class_names: Optional[List[str]] = None, text_filename: str = None) -> str:
    filename = expanduser(filename)

    if dirname(filename):
        makedirs(dirname(filename), exist_ok=True)

    confusion_frame(matrix, class_names).to_csv(filename)

    if text_filename is not None:
        with open(expanduser(text_filename), "w") as file:
            file.write(format_confusion(matrix, class_names) + "\n")

    logger.info(f"wrote confusion matrix to {cl.dir(filename)}")

    return filename


def read_confusion(filename: str) -> np.ndarray:
    return pd.read_csv(expanduser(filename), index_col=0).to_numpy(dtype=np.int64)
