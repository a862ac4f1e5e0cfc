import logging
import threading
from dataclasses import dataclass, fields
from os import makedirs, replace
from os.path import exists, expanduser, join
from typing import Dict, Iterable, List, Optional, Sequence

import colored_logging as cl
import numpy as np

from .constants import REPRESENTATIONS
from .exceptions import MissingRepresentation
from .feature_bundle import FeatureBundle, extract_bundle
from .feature_config import FeatureConfig
from .feature_extractors import spectral_batch, statistical_vector
from .segments import Segment

logger = logging.getLogger(__name__)


def _read_only(array: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if array is not None:
        array.flags.writeable = False

    return array


@dataclass
class FeatureBatch:
    """
    Stacked representations of B segments; any representation the consumer did not ask for is None.
    """
    ids: np.ndarray
    labels: np.ndarray
    temporal: Optional[np.ndarray] = None
    statistical: Optional[np.ndarray] = None
    spectral: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.ids)

    def representation(self, name: str) -> np.ndarray:
        if name not in REPRESENTATIONS:
            raise MissingRepresentation(f"unknown representation '{name}'")

        value = getattr(self, name)

        if value is None:
            raise MissingRepresentation(f"batch does not carry the {name} representation")

        return value

    def take(self, indices: Sequence[int]) -> "FeatureBatch":
        indices = np.asarray(indices, dtype=np.int64)

        return FeatureBatch(**{
            item.name: None if getattr(self, item.name) is None else getattr(self, item.name)[indices]
            for item in fields(self)
        })

    @classmethod
    def from_bundles(cls, bundles: List[FeatureBundle], labels: Optional[Sequence[int]] = None) -> "FeatureBatch":
        if labels is None:
            labels = np.full(len(bundles), -1, dtype=np.int64)

        def stacked(name: str) -> Optional[np.ndarray]:
            values = [getattr(bundle, name) for bundle in bundles]

            if any(value is None for value in values):
                return None

            return np.stack(values).astype(np.float64)

        return cls(
            ids=np.array([bundle.segment_id for bundle in bundles], dtype=np.int64),
            labels=np.asarray(labels, dtype=np.int64),
            temporal=stacked("temporal"),
            statistical=stacked("statistical"),
            spectral=stacked("spectral"),
        )


class FeatureStore:
    """
    Owns the preprocessed segments of an experiment and materializes feature batches on demand.

    Statistical vectors are computed once for every segment. Scalograms are computed per
    batch in 64-bit and, when a cache directory is given, persisted per segment in 32-bit.
    """

    def __init__(
            self,
            segments: List[Segment],
            config: FeatureConfig = None,
            cache_directory: str = None,
            cache_key: str = "default"):
        if config is None:
            config = FeatureConfig()

        self.config = config.validate()
        self._segments: Dict[int, Segment] = {item.id: item for item in segments}
        self.ids = sorted(self._segments)
        self.cache_directory = None if cache_directory is None else join(expanduser(cache_directory), cache_key[:16])
        self._cache_lock = threading.Lock()

        if len(segments) > 0:
            positions = {segment_id: position for position, segment_id in enumerate(self.ids)}
            self._positions = positions
            self._statistical = statistical_vector(np.stack([self._segments[segment_id].data for segment_id in self.ids]))
        else:
            self._positions = {}
            self._statistical = np.zeros((0, 0))

        logger.info(f"feature store holds {cl.val(len(self.ids))} segments")

    def __len__(self) -> int:
        return len(self.ids)

    def segment(self, segment_id: int) -> Segment:
        return self._segments[segment_id]

    @property
    def window_size(self) -> int:
        return self._segments[self.ids[0]].window_size

    @property
    def num_channels(self) -> int:
        return self._segments[self.ids[0]].num_channels

    @property
    def num_scales(self) -> int:
        return self.config.cwt_scales

    def labels(self, ids: Iterable[int]) -> np.ndarray:
        return np.array([self._segments[segment_id].label.class_index for segment_id in ids], dtype=np.int64)

    def temporal(self, ids: Sequence[int]) -> np.ndarray:
        return np.stack([self._segments[segment_id].data for segment_id in ids]).astype(np.float64)

    def statistical(self, ids: Sequence[int]) -> np.ndarray:
        return self._statistical[[self._positions[segment_id] for segment_id in ids]]

    def _cache_filename(self, segment_id: int) -> str:
        return join(self.cache_directory, f"{segment_id}.npy")

    def spectral(self, ids: Sequence[int]) -> np.ndarray:
        ids = list(ids)
        K, S, C = self.config.cwt_scales, self.window_size, self.num_channels
        spectral = np.empty((len(ids), K, S, C), dtype=np.float64)
        missing = []

        for position, segment_id in enumerate(ids):
            if self.cache_directory is not None and exists(self._cache_filename(segment_id)):
                spectral[position] = np.load(self._cache_filename(segment_id)).astype(np.float64)
            else:
                missing.append(position)

        if missing:
            computed = spectral_batch(self.temporal([ids[position] for position in missing]), self.config)
            spectral[missing] = computed

            if self.cache_directory is not None:
                self._write_cache([ids[position] for position in missing], computed)

        logger.debug(f"scalograms for {len(ids)} segments, {len(missing)} computed")

        return spectral

    def _write_cache(self, ids: List[int], spectral: np.ndarray) -> None:
        with self._cache_lock:
            makedirs(self.cache_directory, exist_ok=True)

            for segment_id, values in zip(ids, spectral):
                filename = self._cache_filename(segment_id)
                temporary = f"{filename}.tmp"

                with open(temporary, "wb") as file:
                    np.save(file, values.astype(np.float32))

                replace(temporary, filename)

    def batch(self, ids: Sequence[int], representations: Iterable[str] = REPRESENTATIONS) -> FeatureBatch:
        """Read-only batch carrying only the requested representations."""
        ids = [int(segment_id) for segment_id in ids]
        representations = set(representations)
        unknown = representations - set(REPRESENTATIONS)

        if unknown:
            raise MissingRepresentation(f"unknown representations {sorted(unknown)}")

        return FeatureBatch(
            ids=_read_only(np.array(ids, dtype=np.int64)),
            labels=_read_only(self.labels(ids)),
            temporal=_read_only(self.temporal(ids)) if "temporal" in representations else None,
            statistical=_read_only(self.statistical(ids)) if "statistical" in representations else None,
            spectral=_read_only(self.spectral(ids)) if "spectral" in representations else None,
        )

    def bundle(self, segment_id: int) -> FeatureBundle:
        return extract_bundle(self._segments[segment_id], self.config)
