import logging
from os.path import expanduser, dirname
from os import makedirs
from typing import List, Tuple

import colored_logging as cl
import numpy as np
import pandas as pd

from .dataset_manifest import DatasetManifest
from .exceptions import IngestError, ManifestMismatch
from .raw_recording import RawRecording
from .recording_runs import IngestTally, build_recordings
from .timer import Timer

logger = logging.getLogger(__name__)

USER_COLUMN = "user"
ACTIVITY_COLUMN = "activity"
TIMESTAMP_COLUMN = "timestamp"


def check_header(columns: List[str], manifest: DatasetManifest) -> None:
    """
    The header must name user, activity and exactly the manifest's channels
    (a timestamp column is optional).

    Raises:
        ManifestMismatch: naming the missing and unexpected columns.
    """
    columns = [str(column).strip() for column in columns]
    expected = [USER_COLUMN, ACTIVITY_COLUMN] + list(manifest.channel_names)
    missing = [column for column in expected if column not in columns]
    unexpected = [column for column in columns if column not in expected and column != TIMESTAMP_COLUMN]

    if missing or unexpected:
        message = f"CSV header does not match manifest {manifest.name}:"

        if missing:
            message += f" missing columns {missing}"
        if unexpected:
            message += f" unexpected columns {unexpected}"

        raise ManifestMismatch(message)


def load_generic_csv_with_tally(filename: str, manifest: DatasetManifest) -> Tuple[List[RawRecording], IngestTally]:
    filename = expanduser(filename)
    tally = IngestTally(filename=filename)
    timer = Timer()

    try:
        table = pd.read_csv(filename, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise ManifestMismatch(f"CSV file {filename} has no header; expected {[USER_COLUMN, ACTIVITY_COLUMN] + manifest.channel_names}")
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise IngestError(f"unable to read CSV file {filename}: {e}") from e

    table.columns = [str(column).strip() for column in table.columns]
    check_header(list(table.columns), manifest)

    tally.lines = len(table)

    if len(table) == 0:
        logger.info(f"no samples in {cl.dir(filename)}")
        return [], tally

    numeric_columns = [USER_COLUMN] + list(manifest.channel_names)
    has_timestamps = TIMESTAMP_COLUMN in table.columns

    if has_timestamps:
        numeric_columns.append(TIMESTAMP_COLUMN)

    numeric = table[numeric_columns].apply(pd.to_numeric, errors="coerce")
    activities = table[ACTIVITY_COLUMN].str.strip()
    valid = np.isfinite(numeric.to_numpy(dtype=np.float64)).all(axis=1) & (activities != "").to_numpy()

    tally.malformed = int(np.count_nonzero(~valid))
    tally.malformed_lines = [int(index) + 2 for index in np.flatnonzero(~valid)]

    if tally.malformed > 0:
        logger.warning(f"skipped {cl.val(tally.malformed)} malformed rows of {cl.val(tally.lines)} in {cl.dir(filename)}")

    tally.check()

    numeric = numeric[valid]
    activities = activities[valid]

    if len(numeric) == 0:
        return [], tally

    # unknown activities are fatal
    label_cache = {}
    labels = np.empty(len(activities), dtype=np.int64)

    for position, activity in enumerate(activities):
        if activity not in label_cache:
            label_cache[activity] = manifest.label(activity).class_index

        labels[position] = label_cache[activity]

    recordings = build_recordings(
        users=numeric[USER_COLUMN].to_numpy().astype(np.int64),
        labels=labels,
        values=numeric[list(manifest.channel_names)].to_numpy(dtype=np.float64),
        manifest=manifest,
        timestamps=numeric[TIMESTAMP_COLUMN].to_numpy().astype(np.int64) if has_timestamps else None,
        tally=tally,
    )

    logger.info(f"loaded {cl.val(len(recordings))} recordings from {cl.dir(filename)} ({cl.time(timer)} seconds)")

    return recordings, tally


def load_generic_csv(filename: str, manifest: DatasetManifest) -> List[RawRecording]:
    """
    Ingest a generic multi-channel CSV (`user,activity[,timestamp],<channel...>`, one sample per row).
    Same contract as `load_wisdm`.
    """
    recordings, _ = load_generic_csv_with_tally(filename, manifest)

    return recordings


def write_generic_csv(recordings: List[RawRecording], filename: str) -> str:
    """
    Write recordings in the generic schema with a per-recording timestamp column.
    Recordings are written in the given order.
    """
    filename = expanduser(filename)
    directory = dirname(filename)

    if directory:
        makedirs(directory, exist_ok=True)

    if len(recordings) == 0:
        raise ValueError("no recordings to write")

    channel_names = list(recordings[0].channel_names)
    frames = []

    for recording in recordings:
        frame = pd.DataFrame(recording.channels, columns=channel_names)
        frame.insert(0, TIMESTAMP_COLUMN, recording.first_timestamp + np.arange(len(recording), dtype=np.int64))
        frame.insert(0, ACTIVITY_COLUMN, recording.activity.class_name)
        frame.insert(0, USER_COLUMN, recording.user_id)
        frames.append(frame)

    table = pd.concat(frames, ignore_index=True)
    logger.info(f"writing {cl.val(len(table))} samples to {cl.dir(filename)}")
    table.to_csv(filename, index=False, float_format="%.17g")

    return filename
