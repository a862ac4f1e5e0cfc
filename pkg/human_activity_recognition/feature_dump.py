"""
Plot-ready dumps of the feature representations of individual segments.

temporal     S rows: time, then one column per channel
statistical  C rows: channel, min, max, mean, std
spectral     K x S x C rows: scale, time, channel, value
"""
import logging
from dataclasses import dataclass
from os import makedirs
from os.path import expanduser, join
from typing import Dict, List, Optional, Sequence

import colored_logging as cl
import numpy as np
import pandas as pd

from .activity_label import normalize_class_name
from .constants import STATISTICAL_FUNCTIONS
from .exceptions import EmptySelection
from .feature_bundle import FeatureBundle
from .feature_store import FeatureStore

logger = logging.getLogger(__name__)

DUMP_REPRESENTATIONS = ("temporal", "statistical", "spectral")


@dataclass
class SegmentSelector:
    """Segments of one activity class (first `limit` in id order) or one segment by id."""
    class_name: Optional[str] = None
    segment_id: Optional[int] = None
    limit: int = 1


def select_segments(store: FeatureStore, selector: SegmentSelector) -> List[int]:
    """
    Raises:
        EmptySelection: if no segment matches.
    """
    if selector.segment_id is not None:
        if int(selector.segment_id) not in set(store.ids):
            raise EmptySelection(f"no segment with id {selector.segment_id}")

        return [int(selector.segment_id)]

    ids = store.ids

    if selector.class_name is not None:
        key = normalize_class_name(selector.class_name)
        ids = [segment_id for segment_id in ids if normalize_class_name(store.segment(segment_id).label.class_name) == key]

    ids = ids[:max(int(selector.limit), 0)]

    if len(ids) == 0:
        raise EmptySelection(f"no segment matches class '{selector.class_name}'")

    return ids


def dump_filenames(directory: str, segment_id: int) -> Dict[str, str]:
    return {
        representation: join(expanduser(directory), f"segment_{segment_id}_{representation}.csv")
        for representation in DUMP_REPRESENTATIONS
    }


def write_feature_dump(bundle: FeatureBundle, directory: str, channel_names: Sequence[str], scales: Sequence[float]) -> Dict[str, str]:
    filenames = dump_filenames(directory, bundle.segment_id)
    makedirs(expanduser(directory), exist_ok=True)
    channel_names = list(channel_names)
    S, C = bundle.temporal.shape
    K = bundle.spectral.shape[0]

    temporal = pd.DataFrame(bundle.temporal, columns=channel_names)
    temporal.index.name = "time"
    temporal.to_csv(filenames["temporal"], float_format="%.17g")

    statistical = pd.DataFrame(bundle.statistical.reshape(C, len(STATISTICAL_FUNCTIONS)), columns=list(STATISTICAL_FUNCTIONS))
    statistical.insert(0, "channel", channel_names)
    statistical.to_csv(filenames["statistical"], index=False, float_format="%.17g")

    scale_index, time_index, channel_index = np.meshgrid(np.arange(K), np.arange(S), np.arange(C), indexing="ij")
    spectral = pd.DataFrame({
        "scale": np.asarray(scales, dtype=np.float64)[scale_index.ravel()],
        "time": time_index.ravel(),
        "channel": np.array(channel_names)[channel_index.ravel()],
        "value": bundle.spectral.ravel(),
    })
    spectral.to_csv(filenames["spectral"], index=False, float_format="%.17g")

    logger.info(f"dumped features of segment {cl.val(bundle.segment_id)} to {cl.dir(directory)}")

    return filenames


def read_feature_dump(directory: str, segment_id: int) -> FeatureBundle:
    """Bundle reassembled from a dump; float64 values survive the text round trip exactly."""
    filenames = dump_filenames(directory, segment_id)
    temporal = pd.read_csv(filenames["temporal"], index_col=0, float_precision="round_trip")
    statistical = pd.read_csv(filenames["statistical"], float_precision="round_trip")
    spectral = pd.read_csv(filenames["spectral"], float_precision="round_trip")
    S, C = temporal.shape
    K = len(spectral) // (S * C)

    return FeatureBundle(
        temporal=temporal.to_numpy(dtype=np.float64),
        statistical=statistical[list(STATISTICAL_FUNCTIONS)].to_numpy(dtype=np.float64).reshape(-1),
        spectral=spectral["value"].to_numpy(dtype=np.float64).reshape(K, S, C),
        segment_id=int(segment_id),
    )


def dump_features(store: FeatureStore, selector: SegmentSelector, directory: str, channel_names: Sequence[str]) -> List[Dict[str, str]]:
    """
    Write the temporal, statistical and spectral dumps of every selected segment.

    Returns:
        List[Dict[str, str]]: per segment, the filename of each representation.

    Raises:
        EmptySelection: if the selector resolves to no segment.
    """
    ids = select_segments(store, selector)

    return [
        write_feature_dump(store.bundle(segment_id), directory, channel_names, store.config.scales)
        for segment_id in ids
    ]
