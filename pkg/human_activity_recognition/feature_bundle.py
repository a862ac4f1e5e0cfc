import logging
from dataclasses import dataclass
from os import makedirs
from os.path import dirname, expanduser

import numpy as np

from .constants import BUNDLE_FORMAT_VERSION
from .exceptions import IngestError
from .feature_config import FeatureConfig
from .feature_extractors import spectral_features, statistical_features, temporal_features
from .segments import Segment

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class FeatureBundle:
    """The three representations of one segment."""
    temporal: np.ndarray
    statistical: np.ndarray
    spectral: np.ndarray
    segment_id: int

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureBundle):
            return NotImplemented

        return (
            self.segment_id == other.segment_id
            and np.array_equal(self.temporal, other.temporal)
            and np.array_equal(self.statistical, other.statistical)
            and np.array_equal(self.spectral, other.spectral)
        )


def extract_bundle(segment: Segment, config: FeatureConfig = None) -> FeatureBundle:
    if config is None:
        config = FeatureConfig()

    return FeatureBundle(
        temporal=temporal_features(segment),
        statistical=statistical_features(segment),
        spectral=spectral_features(segment, config),
        segment_id=segment.id,
    )


def save_bundle(bundle: FeatureBundle, filename: str) -> str:
    filename = expanduser(filename)

    if dirname(filename):
        makedirs(dirname(filename), exist_ok=True)

    with open(filename, "wb") as file:
        np.savez(
            file,
            version=np.array(BUNDLE_FORMAT_VERSION),
            segment_id=np.array(bundle.segment_id, dtype=np.int64),
            temporal=bundle.temporal.astype(np.float64),
            statistical=bundle.statistical.astype(np.float64),
            spectral=bundle.spectral.astype(np.float64),
        )

    return filename


def load_bundle(filename: str) -> FeatureBundle:
    filename = expanduser(filename)

    try:
        with np.load(filename) as archive:
            arrays = {key: archive[key] for key in ("version", "segment_id", "temporal", "statistical", "spectral")}
    except (OSError, KeyError, ValueError) as e:
        raise IngestError(f"unable to read feature bundle {filename}: {e}") from e

    version = int(arrays["version"])

    if version != BUNDLE_FORMAT_VERSION:
        raise IngestError(f"feature bundle {filename} has version {version}, expected {BUNDLE_FORMAT_VERSION}")

    return FeatureBundle(
        temporal=arrays["temporal"],
        statistical=arrays["statistical"],
        spectral=arrays["spectral"],
        segment_id=int(arrays["segment_id"]),
    )
