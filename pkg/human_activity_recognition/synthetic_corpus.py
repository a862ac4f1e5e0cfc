import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import List, Optional

import colored_logging as cl
import numpy as np

from .constants import IMU_CHANNEL_NAMES
from .dataset_manifest import DatasetManifest
from .exceptions import ConfigError
from .raw_recording import RawRecording

logger = logging.getLogger(__name__)

# ratio of adjacent default bands over the smallest ratio that keeps them disjoint
BAND_MARGIN = 1.25


def default_amplitude_bands(classes: int, jitter: float) -> List[float]:
    """Geometric bands whose jittered ranges stay disjoint for any class count."""
    if not 0 <= jitter < 1:
        jitter = 0.0

    ratio = BAND_MARGIN * (1.0 + jitter) / (1.0 - jitter)

    return [float(ratio ** k) for k in range(classes)]


def level_codes(classes: int, channels: int) -> np.ndarray:
    """
    Unit-norm per-class level directions drawn from {-1, 0, +1}^channels, ordered by support size,
    so that the first 2 * channels classes sit on single axes (+e_c, -e_c).
    All codes lie on the unit sphere, which keeps every class linearly separable from the rest.
    Codes repeat once the 3^channels - 1 directions run out.
    """
    codes = []

    for support_size in range(1, channels + 1):
        for support in combinations(range(channels), support_size):
            for signs in product((1.0, -1.0), repeat=support_size):
                code = np.zeros(channels)
                code[list(support)] = signs
                codes.append(code / np.sqrt(support_size))

                if len(codes) == classes:
                    return np.array(codes)

    return np.array([codes[k % len(codes)] for k in range(classes)])


@dataclass
class SynthSpec:
    """
    Deterministic sinusoid corpus for CI.

    Class k on channel c is a sinusoid with frequency
    `base_frequency + frequency_step * k` (scaled by `1 + channel_detune * c`) and an amplitude
    drawn per (user, class, channel) inside the band `amplitude_bands[k] * (1 +/- amplitude_jitter)`,
    riding on a constant level `offset_scale * peak * level_codes(classes, channels)[k, c]`
    where `peak` is the largest jittered amplitude.
    Additive noise has standard deviation `noise_level * (1 + noise_spread * k / (classes - 1))`
    relative to the amplitude.
    Bands are disjoint, so per-channel spread statistics separate the classes; the levels make
    every class linearly separable from the rest in the window means.
    """
    classes: int = 6
    users: int = 10
    channels: int = 3
    length: int = 600
    seed: int = 7
    noise_level: float = 0.05
    noise_spread: float = 1.0
    amplitude_bands: Optional[List[float]] = None
    amplitude_jitter: float = 0.1
    offset_scale: float = 4.0
    random_phase: bool = True
    base_frequency: float = 0.01
    frequency_step: float = 0.004
    channel_detune: float = 0.05
    class_names: Optional[List[str]] = None

    def __post_init__(self):
        if self.amplitude_bands is None:
            self.amplitude_bands = default_amplitude_bands(self.classes, self.amplitude_jitter)
        else:
            self.amplitude_bands = [float(band) for band in self.amplitude_bands]

        if self.class_names is None:
            self.class_names = [f"class_{k}" for k in range(self.classes)]

    def validate(self) -> None:
        if self.classes < 2:
            raise ConfigError(f"synthetic corpus needs at least 2 classes, got {self.classes}")
        if self.users < 1 or self.channels < 1 or self.length < 1:
            raise ConfigError(f"synthetic users, channels and length must be positive: {self.users}, {self.channels}, {self.length}")
        if len(self.amplitude_bands) != self.classes:
            raise ConfigError(f"{len(self.amplitude_bands)} amplitude bands for {self.classes} classes")
        if len(self.class_names) != self.classes:
            raise ConfigError(f"{len(self.class_names)} class names for {self.classes} classes")
        if not 0 <= self.amplitude_jitter < 1:
            raise ConfigError(f"amplitude jitter must be in [0, 1), got {self.amplitude_jitter}")
        if self.noise_level < 0 or self.noise_spread < 0:
            raise ConfigError(f"noise level and spread must be non-negative, got {self.noise_level} and {self.noise_spread}")
        if self.offset_scale < 0:
            raise ConfigError(f"offset scale must be non-negative, got {self.offset_scale}")

        bands = sorted(self.amplitude_bands)

        if bands[0] <= 0:
            raise ConfigError("amplitude bands must be positive")

        for lower, upper in zip(bands[:-1], bands[1:]):
            if lower * (1 + self.amplitude_jitter) >= upper * (1 - self.amplitude_jitter):
                raise ConfigError(f"amplitude bands {lower} and {upper} overlap under jitter {self.amplitude_jitter}")

    @property
    def channel_names(self) -> List[str]:
        if self.channels <= len(IMU_CHANNEL_NAMES):
            return IMU_CHANNEL_NAMES[:self.channels]

        return [f"ch_{c}" for c in range(self.channels)]

    def frequency(self, class_index: int, channel: int) -> float:
        """Cycles per sample of class `class_index` on `channel`."""
        return (self.base_frequency + self.frequency_step * class_index) * (1.0 + self.channel_detune * channel)

    def class_noise_level(self, class_index: int) -> float:
        return self.noise_level * (1.0 + self.noise_spread * class_index / (self.classes - 1))

    def levels(self) -> np.ndarray:
        """[classes x channels] constant level of every class on every channel."""
        peak = max(self.amplitude_bands) * (1.0 + self.amplitude_jitter)

        return self.offset_scale * peak * level_codes(self.classes, self.channels)

    @classmethod
    def from_dict(cls, document: dict) -> "SynthSpec":
        allowed = set(cls.__dataclass_fields__)
        unknown = set(document) - allowed

        if unknown:
            raise ConfigError(f"unknown synthetic corpus keys: {sorted(unknown)}")

        return cls(**document)


def synth_signal(amplitude: float, frequency: float, phase: float, length: int, level: float = 0.0) -> np.ndarray:
    """Closed-form `level + amplitude * sin(2 pi frequency t + phase)` for t = 0..length-1."""
    t = np.arange(length, dtype=np.float64)

    return level + amplitude * np.sin(2.0 * np.pi * frequency * t + phase)


def synthetic_manifest(spec: SynthSpec) -> DatasetManifest:
    return DatasetManifest(
        name=f"synthetic-{spec.classes}x{spec.channels}-seed{spec.seed}",
        class_names=list(spec.class_names),
        channel_names=spec.channel_names,
        sampling_note="synthetic sinusoids, one sample per time step",
        format="synthetic",
    )


def synth_generate(spec: SynthSpec) -> List[RawRecording]:
    """
    Generate one recording per (user, class), ordered by user then class.
    Bit-identical for a fixed spec.
    """
    spec.validate()
    manifest = synthetic_manifest(spec)
    levels = spec.levels()
    rng = np.random.default_rng(spec.seed)
    recordings = []

    for user in range(spec.users):
        for class_index in range(spec.classes):
            band = spec.amplitude_bands[class_index]
            amplitudes = band * (1.0 + spec.amplitude_jitter * rng.uniform(-1.0, 1.0, size=spec.channels))

            if spec.random_phase:
                phases = rng.uniform(0.0, 2.0 * np.pi, size=spec.channels)
            else:
                phases = np.zeros(spec.channels)

            noise = rng.standard_normal(size=(spec.length, spec.channels))
            noise_level = spec.class_noise_level(class_index)
            channels = np.empty((spec.length, spec.channels), dtype=np.float64)

            for channel in range(spec.channels):
                channels[:, channel] = synth_signal(
                    amplitude=amplitudes[channel],
                    frequency=spec.frequency(class_index, channel),
                    phase=phases[channel],
                    length=spec.length,
                    level=levels[class_index, channel],
                )

                if noise_level > 0:
                    channels[:, channel] += noise_level * amplitudes[channel] * noise[:, channel]

            recordings.append(RawRecording(
                user_id=user,
                activity=manifest.label_from_index(class_index),
                channels=channels,
                channel_names=list(manifest.channel_names),
                first_timestamp=class_index * spec.length,
            ))

    logger.info(
        f"generated {cl.val(len(recordings))} synthetic recordings "
        f"({cl.val(spec.classes)} classes, {cl.val(spec.users)} users, {cl.val(spec.channels)} channels, seed {cl.val(spec.seed)})"
    )

    return recordings
