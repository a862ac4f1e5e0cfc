import logging
from dataclasses import dataclass, field
from typing import List, Optional

import colored_logging as cl
import numpy as np

from .constants import GAP_FACTOR, MALFORMED_FRACTION_LIMIT
from .dataset_manifest import DatasetManifest
from .exceptions import MalformedCorpus
from .raw_recording import RawRecording

logger = logging.getLogger(__name__)


@dataclass
class IngestTally:
    """Per-file ingestion counts, logged and carried into reports."""
    filename: str = ""
    lines: int = 0
    malformed: int = 0
    samples: int = 0
    recordings: int = 0
    gap_splits: int = 0
    malformed_lines: List[int] = field(default_factory=list)

    @property
    def malformed_fraction(self) -> float:
        return self.malformed / self.lines if self.lines > 0 else 0.0

    def check(self, limit: float = MALFORMED_FRACTION_LIMIT) -> None:
        if self.malformed_fraction > limit:
            raise MalformedCorpus(
                f"{self.malformed} of {self.lines} lines in {self.filename} are malformed "
                f"({self.malformed_fraction:.1%} > {limit:.0%}); the corpus is likely the wrong file"
            )

    def to_dict(self) -> dict:
        return {
            "filename": self.filename,
            "lines": self.lines,
            "malformed": self.malformed,
            "samples": self.samples,
            "recordings": self.recordings,
            "gap_splits": self.gap_splits,
        }


def median_sampling_interval(users: np.ndarray, labels: np.ndarray, timestamps: np.ndarray) -> Optional[float]:
    """Median positive timestamp step between consecutive rows of the same (user, activity)."""
    if len(timestamps) < 2:
        return None

    same_run = (users[1:] == users[:-1]) & (labels[1:] == labels[:-1])
    steps = np.diff(timestamps.astype(np.float64))[same_run]
    steps = steps[steps > 0]

    if len(steps) == 0:
        return None

    return float(np.median(steps))


def build_recordings(
        users: np.ndarray,
        labels: np.ndarray,
        values: np.ndarray,
        manifest: DatasetManifest,
        timestamps: Optional[np.ndarray] = None,
        tally: Optional[IngestTally] = None,
        gap_factor: float = GAP_FACTOR) -> List[RawRecording]:
    """
    Cut a flat sample stream into maximal contiguous (user, activity) runs.

    A run also ends where the timestamp steps backwards or jumps by more than
    `gap_factor` times the median sampling interval.
    """
    if tally is None:
        tally = IngestTally()

    if len(users) == 0:
        return []

    users = np.asarray(users, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)

    boundary = np.zeros(len(users), dtype=bool)
    boundary[0] = True
    boundary[1:] = (users[1:] != users[:-1]) | (labels[1:] != labels[:-1])

    if timestamps is not None:
        timestamps = np.asarray(timestamps, dtype=np.int64)
        median_step = median_sampling_interval(users, labels, timestamps)

        if median_step is not None:
            steps = np.diff(timestamps.astype(np.float64))
            gaps = (steps < 0) | (steps > gap_factor * median_step)
            tally.gap_splits = int(np.count_nonzero(gaps & ~boundary[1:]))
            boundary[1:] |= gaps

    starts = np.flatnonzero(boundary)
    ends = np.append(starts[1:], len(users))
    labels_by_index = manifest.labels
    recordings = []

    for order, (start, end) in enumerate(zip(starts, ends)):
        first_timestamp = int(timestamps[start]) if timestamps is not None else int(start)

        recordings.append((
            int(users[start]),
            first_timestamp,
            order,
            RawRecording(
                user_id=int(users[start]),
                activity=labels_by_index[int(labels[start])],
                channels=values[start:end],
                channel_names=list(manifest.channel_names),
                first_timestamp=first_timestamp,
            )
        ))

    recordings.sort(key=lambda item: item[:3])
    recordings = [item[3] for item in recordings]

    tally.samples = int(len(users))
    tally.recordings = len(recordings)

    logger.info(
        f"built {cl.val(len(recordings))} recordings from {cl.val(len(users))} samples "
        f"({cl.val(tally.gap_splits)} timestamp-gap splits)"
    )

    return recordings
