from dataclasses import dataclass, replace

import numpy as np

from .activity_label import ActivityLabel


@dataclass(eq=False)
class Segment:
    """
    Fixed-length window [S x C] cut from one recording.
    `source_recording` indexes the recording in corpus order and `start_index` is the first row.
    """
    id: int
    data: np.ndarray
    label: ActivityLabel
    user_id: int
    source_recording: int
    start_index: int

    @property
    def window_size(self) -> int:
        return self.data.shape[0]

    @property
    def num_channels(self) -> int:
        return self.data.shape[1]

    def with_data(self, data: np.ndarray) -> "Segment":
        return replace(self, data=data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Segment):
            return NotImplemented

        return (
            self.id == other.id
            and self.label == other.label
            and self.user_id == other.user_id
            and self.source_recording == other.source_recording
            and self.start_index == other.start_index
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return (
            f"Segment(id={self.id}, label={self.label.class_name!r}, user_id={self.user_id}, "
            f"recording={self.source_recording}, start={self.start_index}, shape={self.data.shape})"
        )
