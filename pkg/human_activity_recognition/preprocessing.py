import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Tuple

import colored_logging as cl

from .normalization import NormalizationStats, apply_normalization, fit_normalization
from .preprocess_config import PreprocessConfig
from .raw_recording import RawRecording
from .segmentation import segment_recordings
from .segments import Segment
from .smoothing import moving_average
from .timer import Timer

logger = logging.getLogger(__name__)


def smooth_segment(segment: Segment, M: int) -> Segment:
    return segment.with_data(moving_average(segment.data, M))


def preprocess_pipeline(
        recordings: List[RawRecording],
        config: PreprocessConfig,
        train_ids: Optional[Iterable[int]] = None,
        workers: int = 1) -> Tuple[List[Segment], Optional[NormalizationStats]]:
    """
    Segmentation, then per-segment moving-average smoothing, then min-max normalization.

    Args:
        recordings (List[RawRecording]): corpus in corpus order.
        config (PreprocessConfig): window, overlap and smoothing settings.
        train_ids (Optional[Iterable[int]]): ids of the training segments the normalization is
            fitted on. Without it the statistics are fitted on every segment.
        workers (int): threads used for smoothing.

    Returns:
        Tuple[List[Segment], Optional[NormalizationStats]]: normalized segments (same ids as
        `segment_recordings`) and the fitted statistics, or ([], None) for an empty corpus.
    """
    config.validate()
    timer = Timer()
    segments = segment_recordings(recordings, config)

    if len(segments) == 0:
        logger.warning("no segments to preprocess")
        return [], None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            segments = list(executor.map(lambda item: smooth_segment(item, config.smoothing_window), segments))
    else:
        segments = [smooth_segment(item, config.smoothing_window) for item in segments]

    if train_ids is None:
        fitted_on = "all"
        train_segments = segments
    else:
        fitted_on = "train"
        train_ids = set(train_ids)
        train_segments = [item for item in segments if item.id in train_ids]

    stats = fit_normalization(train_segments, channel_names=recordings[0].channel_names, fitted_on=fitted_on)
    segments = [apply_normalization(item, stats) for item in segments]

    logger.info(f"preprocessed {cl.val(len(segments))} segments ({cl.time(timer)} seconds)")

    return segments, stats
