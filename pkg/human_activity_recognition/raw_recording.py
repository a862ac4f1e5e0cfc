import hashlib
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .activity_label import ActivityLabel


@dataclass(eq=False)
class RawRecording:
    """
    One user's labeled multi-channel sensor stream at the native sampling rate.

    Attributes:
        user_id (int): subject identifier.
        activity (ActivityLabel): label shared by every sample.
        channels (np.ndarray): float64 matrix [L x C], rows are time steps.
        channel_names (List[str]): C axis names.
        first_timestamp (int): timestamp of the first row, used for ordering.
    """
    user_id: int
    activity: ActivityLabel
    channels: np.ndarray
    channel_names: List[str] = field(default_factory=list)
    first_timestamp: int = 0

    def __post_init__(self):
        self.channels = np.ascontiguousarray(self.channels, dtype=np.float64)

        if self.channels.ndim != 2:
            raise ValueError(f"recording channels must be a matrix, got shape {self.channels.shape}")

        if len(self.channel_names) != self.channels.shape[1]:
            raise ValueError(
                f"{len(self.channel_names)} channel names for {self.channels.shape[1]} channel columns"
            )

        if not np.isfinite(self.channels).all():
            raise ValueError(f"recording for user {self.user_id} contains non-finite samples")

    def __len__(self) -> int:
        return self.channels.shape[0]

    def __repr__(self) -> str:
        return (
            f"RawRecording(user_id={self.user_id}, activity={self.activity.class_name!r}, "
            f"length={len(self)}, channels={self.channel_names})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RawRecording):
            return NotImplemented

        return (
            self.user_id == other.user_id
            and self.activity == other.activity
            and self.channel_names == other.channel_names
            and self.first_timestamp == other.first_timestamp
            and np.array_equal(self.channels, other.channels)
        )

    @property
    def length(self) -> int:
        return len(self)

    @property
    def num_channels(self) -> int:
        return self.channels.shape[1]


def serialize_recordings(recordings: List[RawRecording]) -> bytes:
    """
    Canonical byte form of a corpus: per recording an int64 header
    (user, class index, first timestamp, L, C) then little-endian float64 samples.
    """
    parts = []

    for recording in recordings:
        header = np.array(
            [recording.user_id, recording.activity.class_index, recording.first_timestamp, *recording.channels.shape],
            dtype="<i8",
        )
        parts.append(header.tobytes())
        parts.append(np.ascontiguousarray(recording.channels, dtype="<f8").tobytes())

    return b"".join(parts)


def corpus_digest(recordings: List[RawRecording]) -> str:
    return hashlib.sha256(serialize_recordings(recordings)).hexdigest()
