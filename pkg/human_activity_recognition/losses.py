"""
Cross-entropy, supervised contrastive and triplet losses over autodiff tensors.
Each loss returns a `LossValue` whose tensor is the mean of its per-item terms.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from .constants import DEFAULT_TEMPERATURE, DEFAULT_TRIPLET_MARGIN, PROBABILITY_FLOOR
from .exceptions import LabelOutOfRange, NoPositivePairs, ShapeMismatch
from .tensor import Tensor, as_tensor
from .tensor_ops import (
    add,
    clip_min,
    div,
    euclidean_distance,
    getitem,
    log,
    masked_log_softmax,
    matmul,
    mul,
    neg,
    reduce_mean,
    reduce_sum,
    relu,
    sub,
    swap_last,
)

logger = logging.getLogger(__name__)

Operand = Union[Tensor, np.ndarray]


@dataclass
class LossValue:
    tensor: Tensor
    terms: np.ndarray
    excluded: int = 0

    @property
    def scalar(self) -> float:
        return float(self.tensor.item())

    def __float__(self) -> float:
        return self.scalar


def _check_labels(labels, count: int, num_classes: int = None) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)

    if labels.shape != (count,):
        raise ShapeMismatch(f"expected {count} labels, got shape {labels.shape}")

    if labels.size and (labels.min() < 0 or (num_classes is not None and labels.max() >= num_classes)):
        raise LabelOutOfRange(f"labels must lie in [0, {num_classes}), got range [{labels.min()}, {labels.max()}]")

    return labels


def ce_loss(probabilities: Operand, labels) -> LossValue:
    """
    Mean of -log(p_true) over the batch with p_true clipped at 1e-12.

    Raises:
        LabelOutOfRange: if a label does not index a probability column.
    """
    probabilities = as_tensor(probabilities)

    if probabilities.ndim != 2:
        raise ShapeMismatch(f"probabilities must be [B x Z], got {probabilities.shape}")

    B, Z = probabilities.shape
    labels = _check_labels(labels, B, Z)
    terms = neg(log(clip_min(getitem(probabilities, (np.arange(B), labels)), PROBABILITY_FLOOR)))

    return LossValue(tensor=reduce_mean(terms), terms=terms.values.copy())


def supcon_loss(embeddings: Operand, labels, temperature: float = DEFAULT_TEMPERATURE) -> LossValue:
    """
    Supervised contrastive loss over L2-normalized embeddings [B x D].

    For anchor i with positives P(i) (same label, not i) and the softmax over every other item:

        l_i = -1/|P(i)| sum_{p in P(i)} log( exp(e_i . e_p / t) / sum_{b != i} exp(e_i . e_b / t) )

    Anchors without positives are left out and counted in `excluded`.

    Raises:
        NoPositivePairs: if no anchor in the batch has a positive.
    """
    embeddings = as_tensor(embeddings)

    if embeddings.ndim != 2:
        raise ShapeMismatch(f"embeddings must be [B x D], got {embeddings.shape}")

    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")

    B = embeddings.shape[0]
    labels = _check_labels(labels, B)
    others = ~np.eye(B, dtype=bool)
    positives = (labels[:, np.newaxis] == labels[np.newaxis, :]) & others
    counts = positives.sum(axis=1)
    anchors = np.flatnonzero(counts > 0)

    if len(anchors) == 0:
        raise NoPositivePairs(f"none of the {B} anchors in the batch has a same-label partner")

    similarity = mul(matmul(embeddings, swap_last(embeddings)), 1.0 / temperature)
    log_probability = masked_log_softmax(similarity, others, axis=1)
    positive_sum = reduce_sum(mul(log_probability, positives.astype(np.float64)), axis=1)
    terms = neg(div(getitem(positive_sum, anchors), counts[anchors].astype(np.float64)))
    excluded = B - len(anchors)

    if excluded:
        logger.debug(f"supervised contrastive loss excluded {excluded} of {B} anchors without positives")

    return LossValue(tensor=reduce_mean(terms), terms=terms.values.copy(), excluded=excluded)


def triplet_loss(anchor: Operand, positive: Operand, negative: Operand, margin: float = DEFAULT_TRIPLET_MARGIN) -> LossValue:
    """Mean over triplets of max(d(a, p) - d(a, n) + m, 0) with Euclidean d."""
    anchor, positive, negative = as_tensor(anchor), as_tensor(positive), as_tensor(negative)

    if not anchor.shape == positive.shape == negative.shape:
        raise ShapeMismatch(f"triplet embeddings differ in shape: {anchor.shape}, {positive.shape}, {negative.shape}")

    terms = relu(add(sub(euclidean_distance(anchor, positive), euclidean_distance(anchor, negative)), margin))

    return LossValue(tensor=reduce_mean(terms), terms=terms.values.copy())
