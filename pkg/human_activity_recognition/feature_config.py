from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .constants import (
    DEFAULT_CWT_SCALES,
    DEFAULT_MORLET_CENTER_FREQUENCY,
    SPECTRAL_VALUES,
    STATISTICAL_FUNCTIONS,
    WAVELETS,
)
from .exceptions import ConfigError, InvalidFeatureConfig


@dataclass(frozen=True)
class FeatureConfig:
    statistical_functions: Tuple[str, ...] = STATISTICAL_FUNCTIONS
    cwt_scales: int = DEFAULT_CWT_SCALES
    wavelet: str = "morlet"
    morlet_center_frequency: float = DEFAULT_MORLET_CENTER_FREQUENCY
    spectral_value: str = "magnitude"

    def __post_init__(self):
        object.__setattr__(self, "statistical_functions", tuple(self.statistical_functions))

    @property
    def scales(self) -> np.ndarray:
        """Integer scales 1..K."""
        return np.arange(1, self.cwt_scales + 1, dtype=np.float64)

    def validate(self) -> "FeatureConfig":
        if self.statistical_functions != STATISTICAL_FUNCTIONS:
            raise InvalidFeatureConfig(f"statistical functions are fixed to {STATISTICAL_FUNCTIONS}, got {self.statistical_functions}")
        if self.cwt_scales < 1:
            raise InvalidFeatureConfig(f"number of CWT scales must be at least 1, got {self.cwt_scales}")
        if self.wavelet not in WAVELETS:
            raise InvalidFeatureConfig(f"wavelet must be one of {WAVELETS}, got '{self.wavelet}'")
        if not self.morlet_center_frequency > 0:
            raise InvalidFeatureConfig(f"Morlet center frequency must be positive, got {self.morlet_center_frequency}")
        if self.spectral_value not in SPECTRAL_VALUES:
            raise InvalidFeatureConfig(f"spectral value must be one of {SPECTRAL_VALUES}, got '{self.spectral_value}'")

        return self

    @classmethod
    def from_dict(cls, document: dict) -> "FeatureConfig":
        unknown = set(document) - set(cls.__dataclass_fields__)

        if unknown:
            raise ConfigError(f"unknown feature keys: {sorted(unknown)}")

        return cls(**document).validate()
