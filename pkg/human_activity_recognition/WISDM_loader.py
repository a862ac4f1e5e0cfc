import logging
import math
from os.path import expanduser
from typing import List, Tuple

import colored_logging as cl
import numpy as np

from .dataset_manifest import DatasetManifest
from .exceptions import IngestError
from .raw_recording import RawRecording
from .recording_runs import IngestTally, build_recordings
from .timer import Timer

logger = logging.getLogger(__name__)

WISDM_FIELD_COUNT = 6


def parse_wisdm_record(record: str) -> Tuple[int, str, int, float, float, float]:
    """
    Parse one `user,activity,timestamp,x,y,z` record (semicolon already stripped).

    Raises:
        ValueError: if the record is truncated, has extra fields or non-finite values.
    """
    fields = [part.strip() for part in record.split(",")]

    # tolerate a dangling comma before the semicolon
    if len(fields) == WISDM_FIELD_COUNT + 1 and fields[-1] == "":
        fields = fields[:-1]

    if len(fields) != WISDM_FIELD_COUNT:
        raise ValueError(f"expected {WISDM_FIELD_COUNT} fields, got {len(fields)}")

    user = int(fields[0])
    activity = fields[1]

    if activity == "":
        raise ValueError("empty activity")

    try:
        timestamp = int(fields[2])
    except ValueError:
        # scientific notation
        timestamp = int(float(fields[2]))

    x, y, z = (float(value) for value in fields[3:6])

    if not all(math.isfinite(value) for value in (x, y, z)):
        raise ValueError("non-finite sample")

    return user, activity, timestamp, x, y, z


def load_wisdm_with_tally(filename: str, manifest: DatasetManifest) -> Tuple[List[RawRecording], IngestTally]:
    filename = expanduser(filename)
    tally = IngestTally(filename=filename)
    timer = Timer()

    try:
        with open(filename, "r", encoding="utf-8") as file:
            text = file.read()
    except (OSError, UnicodeDecodeError) as e:
        raise IngestError(f"unable to read WISDM file {filename}: {e}") from e

    users = []
    labels = []
    timestamps = []
    values = []

    for line_number, line in enumerate(text.splitlines(), start=1):
        # a physical line may carry more than one `;`-terminated record
        for record in line.split(";"):
            if record.strip() == "":
                continue

            tally.lines += 1

            try:
                user, activity, timestamp, x, y, z = parse_wisdm_record(record)
            except ValueError as e:
                tally.malformed += 1
                tally.malformed_lines.append(line_number)
                logger.debug(f"malformed WISDM record on line {line_number}: {e}")
                continue

            # unknown activities are fatal, not malformed
            label = manifest.label(activity)

            users.append(user)
            labels.append(label.class_index)
            timestamps.append(timestamp)
            values.append((x, y, z))

    if tally.malformed > 0:
        logger.warning(f"skipped {cl.val(tally.malformed)} malformed records of {cl.val(tally.lines)} in {cl.dir(filename)}")

    tally.check()

    if len(values) == 0:
        logger.info(f"no samples in {cl.dir(filename)}")
        return [], tally

    recordings = build_recordings(
        users=np.array(users, dtype=np.int64),
        labels=np.array(labels, dtype=np.int64),
        values=np.array(values, dtype=np.float64),
        manifest=manifest,
        timestamps=np.array(timestamps, dtype=np.int64),
        tally=tally,
    )

    logger.info(
        f"loaded {cl.val(len(recordings))} WISDM recordings from {cl.val(len(set(users)))} users "
        f"in {cl.dir(filename)} ({cl.time(timer)} seconds)"
    )

    return recordings, tally


def load_wisdm(filename: str, manifest: DatasetManifest) -> List[RawRecording]:
    """
    Ingest a WISDM v1.1 raw file (`user,activity,timestamp,x,y,z;` per record).

    Args:
        filename (str): path to the raw text file.
        manifest (DatasetManifest): class and channel names of the corpus.

    Returns:
        List[RawRecording]: one recording per maximal contiguous (user, activity) run,
        sorted by (user_id, first timestamp).

    Raises:
        IngestError: if the file cannot be read.
        UnknownActivity: if a well-formed record names an activity outside the manifest.
        MalformedCorpus: if more than 10% of the records are malformed.
    """
    recordings, _ = load_wisdm_with_tally(filename, manifest)

    return recordings
