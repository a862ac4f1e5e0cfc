"""
Binary cache of preprocessed segments keyed by (corpus digest, preprocess config digest).

Layout, little-endian:
    magic (8 bytes) | version uint32 | corpus digest (64 ASCII) | config digest (64 ASCII)
    | N, S, C int64 | JSON length uint32 + JSON (class names, channel names, fitted_on)
    | minimum [C] float64 | maximum [C] float64
    | metadata [N x 5] int64 (id, class index, user, source recording, start)
    | data [N x S x C] float64, row-major
"""
import json
import logging
import struct
from os import makedirs, replace
from os.path import dirname, exists, expanduser, join
from typing import List, Optional, Tuple

import colored_logging as cl
import numpy as np

from .activity_label import ActivityLabel
from .constants import SEGMENT_CACHE_MAGIC, SEGMENT_CACHE_VERSION
from .exceptions import IngestError
from .normalization import NormalizationStats
from .segments import Segment

logger = logging.getLogger(__name__)

HEADER = struct.Struct("<8sI64s64sqqq")


def segment_cache_path(directory: str, corpus_digest: str, config_digest: str) -> str:
    return join(expanduser(directory), f"segments_{corpus_digest[:16]}_{config_digest[:16]}.bin")


def save_segment_cache(
        filename: str,
        segments: List[Segment],
        stats: NormalizationStats,
        corpus_digest: str,
        config_digest: str,
        class_names: List[str],
        channel_names: List[str]) -> str:
    filename = expanduser(filename)
    N = len(segments)
    S = segments[0].window_size if N > 0 else 0
    C = len(channel_names)

    header = HEADER.pack(
        SEGMENT_CACHE_MAGIC,
        SEGMENT_CACHE_VERSION,
        corpus_digest.encode("ascii"),
        config_digest.encode("ascii"),
        N, S, C,
    )

    document = json.dumps({
        "class_names": list(class_names),
        "channel_names": list(channel_names),
        "fitted_on": stats.fitted_on,
    }, sort_keys=True).encode("utf-8")

    metadata = np.array(
        [[item.id, item.label.class_index, item.user_id, item.source_recording, item.start_index] for item in segments],
        dtype="<i8",
    ).reshape(N, 5)

    data = np.stack([item.data for item in segments]).astype("<f8") if N > 0 else np.zeros((0, S, C), dtype="<f8")

    directory = dirname(filename)

    if directory:
        makedirs(directory, exist_ok=True)

    temporary = f"{filename}.tmp"

    with open(temporary, "wb") as file:
        file.write(header)
        file.write(struct.pack("<I", len(document)))
        file.write(document)
        file.write(stats.minimum.astype("<f8").tobytes())
        file.write(stats.maximum.astype("<f8").tobytes())
        file.write(metadata.tobytes())
        file.write(np.ascontiguousarray(data).tobytes())

    replace(temporary, filename)
    logger.info(f"cached {cl.val(N)} segments at {cl.dir(filename)}")

    return filename


def load_segment_cache(
        filename: str,
        corpus_digest: str,
        config_digest: str) -> Optional[Tuple[List[Segment], NormalizationStats]]:
    """
    Returns None when the file is absent or was written for another corpus or config.

    Raises:
        IngestError: if the file is not a segment cache or is truncated.
    """
    filename = expanduser(filename)

    if not exists(filename):
        logger.debug(f"segment cache miss: {filename}")
        return None

    with open(filename, "rb") as file:
        payload = file.read()

    if len(payload) < HEADER.size:
        raise IngestError(f"segment cache {filename} is truncated")

    magic, version, corpus, config, N, S, C = HEADER.unpack_from(payload, 0)

    if magic != SEGMENT_CACHE_MAGIC:
        raise IngestError(f"{filename} is not a segment cache")

    if version != SEGMENT_CACHE_VERSION:
        raise IngestError(f"segment cache {filename} has version {version}, expected {SEGMENT_CACHE_VERSION}")

    if corpus.decode("ascii") != corpus_digest or config.decode("ascii") != config_digest:
        logger.debug(f"segment cache {filename} was written for another corpus or config")
        return None

    offset = HEADER.size
    (document_length,) = struct.unpack_from("<I", payload, offset)
    offset += 4
    document = json.loads(payload[offset:offset + document_length].decode("utf-8"))
    offset += document_length

    expected = offset + 8 * (2 * C + 5 * N + N * S * C)

    if len(payload) != expected:
        raise IngestError(f"segment cache {filename} has {len(payload)} bytes, expected {expected}")

    minimum = np.frombuffer(payload, dtype="<f8", count=C, offset=offset)
    offset += 8 * C
    maximum = np.frombuffer(payload, dtype="<f8", count=C, offset=offset)
    offset += 8 * C
    metadata = np.frombuffer(payload, dtype="<i8", count=5 * N, offset=offset).reshape(N, 5)
    offset += 8 * 5 * N
    data = np.frombuffer(payload, dtype="<f8", count=N * S * C, offset=offset).reshape(N, S, C)

    class_names = document["class_names"]
    stats = NormalizationStats(minimum=minimum, maximum=maximum, fitted_on=document["fitted_on"])
    segments = [
        Segment(
            id=int(row[0]),
            data=data[index].astype(np.float64),
            label=ActivityLabel(int(row[1]), class_names[int(row[1])]),
            user_id=int(row[2]),
            source_recording=int(row[3]),
            start_index=int(row[4]),
        )
        for index, row in enumerate(metadata)
    ]

    logger.info(f"loaded {cl.val(N)} cached segments from {cl.dir(filename)}")

    return segments, stats
