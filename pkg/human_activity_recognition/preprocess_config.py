import math
from dataclasses import dataclass

from .constants import (
    DEFAULT_OVERLAP_FRACTION,
    DEFAULT_SMOOTHING_WINDOW,
    DEFAULT_WINDOW_SIZE,
    NORMALIZATION_METHODS,
)
from .exceptions import ConfigError, InvalidPreprocessConfig


@dataclass(frozen=True)
class PreprocessConfig:
    window_size: int = DEFAULT_WINDOW_SIZE
    overlap_fraction: float = DEFAULT_OVERLAP_FRACTION
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
    normalization: str = "train_split_min_max"

    @property
    def stride(self) -> int:
        """S - floor(overlap * S); 45 for the defaults."""
        return self.window_size - math.floor(self.overlap_fraction * self.window_size)

    def validate(self) -> "PreprocessConfig":
        if not self.window_size >= self.smoothing_window >= 1:
            raise InvalidPreprocessConfig(
                f"window size {self.window_size} and smoothing window {self.smoothing_window} must satisfy S >= M >= 1"
            )
        if not 0 <= self.overlap_fraction < 1:
            raise InvalidPreprocessConfig(f"overlap fraction must be in [0, 1), got {self.overlap_fraction}")
        if self.stride < 1:
            raise InvalidPreprocessConfig(f"stride {self.stride} must be at least 1")
        if self.normalization not in NORMALIZATION_METHODS:
            raise InvalidPreprocessConfig(f"normalization must be one of {NORMALIZATION_METHODS}, got '{self.normalization}'")

        return self

    @classmethod
    def from_dict(cls, document: dict) -> "PreprocessConfig":
        unknown = set(document) - set(cls.__dataclass_fields__)

        if unknown:
            raise ConfigError(f"unknown preprocess keys: {sorted(unknown)}")

        return cls(**document).validate()
