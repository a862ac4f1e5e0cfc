import logging
from dataclasses import dataclass
from typing import List, Optional

import colored_logging as cl
import numpy as np

from .exceptions import DegenerateChannel
from .segments import Segment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizationStats:
    """Per-channel global min/max, immutable once fitted."""
    minimum: np.ndarray
    maximum: np.ndarray
    fitted_on: str = "train"

    def __post_init__(self):
        minimum = np.array(self.minimum, dtype=np.float64)
        maximum = np.array(self.maximum, dtype=np.float64)
        minimum.flags.writeable = False
        maximum.flags.writeable = False
        object.__setattr__(self, "minimum", minimum)
        object.__setattr__(self, "maximum", maximum)

    @property
    def span(self) -> np.ndarray:
        return self.maximum - self.minimum

    def to_dict(self) -> dict:
        return {
            "minimum": self.minimum.tolist(),
            "maximum": self.maximum.tolist(),
            "fitted_on": self.fitted_on,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "NormalizationStats":
        return cls(
            minimum=np.array(document["minimum"]),
            maximum=np.array(document["maximum"]),
            fitted_on=document.get("fitted_on", "train"),
        )


def fit_normalization(
        train_segments: List[Segment],
        channel_names: Optional[List[str]] = None,
        fitted_on: str = "train") -> NormalizationStats:
    """
    Per-channel min and max over every row of every training segment.

    Raises:
        ValueError: on an empty training set.
        DegenerateChannel: if a channel is constant over the training set.
    """
    if len(train_segments) == 0:
        raise ValueError("cannot fit normalization on an empty training set")

    minimum = np.min([segment.data.min(axis=0) for segment in train_segments], axis=0)
    maximum = np.max([segment.data.max(axis=0) for segment in train_segments], axis=0)

    for channel in np.flatnonzero(~(minimum < maximum)):
        name = channel_names[channel] if channel_names is not None else f"channel {channel}"
        raise DegenerateChannel(f"{name} is constant ({minimum[channel]}) over the {fitted_on} segments")

    logger.info(
        f"fitted min-max normalization on {cl.val(len(train_segments))} {fitted_on} segments: "
        f"min {cl.val(np.round(minimum, 4).tolist())} max {cl.val(np.round(maximum, 4).tolist())}"
    )

    return NormalizationStats(minimum=minimum, maximum=maximum, fitted_on=fitted_on)


def apply_normalization(segment: Segment, stats: NormalizationStats) -> Segment:
    """
    Map x to (x - min[c]) / (max[c] - min[c]) and clamp to [0, 1].
    Training segments already lie inside the fitted range, so the clamp leaves them unchanged.
    """
    normalized = (segment.data - stats.minimum) / stats.span

    return segment.with_data(np.clip(normalized, 0.0, 1.0))


def invert_normalization(segment: Segment, stats: NormalizationStats) -> Segment:
    """Affine inverse of `apply_normalization` (exact for unclamped values)."""
    return segment.with_data(segment.data * stats.span + stats.minimum)
