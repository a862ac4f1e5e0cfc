import logging
from typing import List

import colored_logging as cl

from .preprocess_config import PreprocessConfig
from .raw_recording import RawRecording
from .segments import Segment

logger = logging.getLogger(__name__)


def segment_count(length: int, window_size: int, stride: int) -> int:
    """floor((L - S) / stride) + 1 when L >= S, else 0."""
    if length < window_size:
        return 0

    return (length - window_size) // stride + 1


def segment(
        recording: RawRecording,
        config: PreprocessConfig,
        recording_index: int = 0,
        first_id: int = 0) -> List[Segment]:
    """
    Cut a recording into windows of `config.window_size` rows starting at 0, stride, 2 * stride, ...

    Every segment inherits the recording's label and user. Recordings shorter than the
    window yield no segments.
    """
    config.validate()
    window_size = config.window_size
    stride = config.stride
    count = segment_count(len(recording), window_size, stride)

    return [
        Segment(
            id=first_id + position,
            data=recording.channels[start:start + window_size].copy(),
            label=recording.activity,
            user_id=recording.user_id,
            source_recording=recording_index,
            start_index=start,
        )
        for position, start in enumerate(range(0, count * stride, stride))
    ]


def segment_recordings(recordings: List[RawRecording], config: PreprocessConfig) -> List[Segment]:
    """
    Segment a corpus; segment ids enumerate recordings in corpus order, then window start.
    """
    segments = []
    short = 0

    for recording_index, recording in enumerate(recordings):
        windows = segment(recording, config, recording_index=recording_index, first_id=len(segments))

        if len(windows) == 0:
            short += 1

        segments.extend(windows)

    if short > 0:
        logger.warning(
            f"{cl.val(short)} of {cl.val(len(recordings))} recordings are shorter than the "
            f"{cl.val(config.window_size)}-sample window and produced no segments"
        )

    logger.info(
        f"cut {cl.val(len(segments))} segments (S={cl.val(config.window_size)}, stride={cl.val(config.stride)}) "
        f"from {cl.val(len(recordings))} recordings"
    )

    return segments
