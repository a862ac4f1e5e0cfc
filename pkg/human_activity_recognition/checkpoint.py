"""
Parameter checkpoints.

Layout, little-endian: magic (8 bytes) | version uint32 | config digest (64 ASCII) | count uint32
| per tensor: name length uint32, UTF-8 name, ndim uint32, dims int64 x ndim
| values of every tensor in table order, row-major float64.
"""
import logging
import struct
from collections import OrderedDict
from os import makedirs, replace
from os.path import dirname, expanduser
from typing import Dict, Optional, Tuple

import colored_logging as cl
import numpy as np

from .constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from .exceptions import CheckpointError

logger = logging.getLogger(__name__)

HEADER = struct.Struct("<8sI64sI")


def save_checkpoint(filename: str, state: Dict[str, np.ndarray], config_digest: str) -> str:
    filename = expanduser(filename)

    if len(config_digest) != 64:
        raise CheckpointError(f"config digest must be 64 hex characters, got {len(config_digest)}")

    if dirname(filename):
        makedirs(dirname(filename), exist_ok=True)

    table = [HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, config_digest.encode("ascii"), len(state))]

    for name, values in state.items():
        encoded = name.encode("utf-8")
        table.append(struct.pack("<I", len(encoded)) + encoded)
        table.append(struct.pack("<I", values.ndim) + np.array(values.shape, dtype="<i8").tobytes())

    temporary = f"{filename}.tmp"

    with open(temporary, "wb") as file:
        file.write(b"".join(table))

        for values in state.values():
            file.write(np.ascontiguousarray(values, dtype="<f8").tobytes())

    replace(temporary, filename)
    logger.info(f"wrote checkpoint with {cl.val(len(state))} tensors to {cl.dir(filename)}")

    return filename


def load_checkpoint(filename: str, expected_digest: Optional[str] = None) -> Tuple["OrderedDict[str, np.ndarray]", str]:
    """
    Returns:
        (state, config digest)

    Raises:
        CheckpointError: on a missing, foreign, truncated or mismatched file.
    """
    filename = expanduser(filename)

    try:
        with open(filename, "rb") as file:
            payload = file.read()
    except OSError as e:
        raise CheckpointError(f"unable to read checkpoint {filename}: {e}") from e

    if len(payload) < HEADER.size:
        raise CheckpointError(f"checkpoint {filename} is truncated")

    magic, version, digest, count = HEADER.unpack_from(payload, 0)

    if magic != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{filename} is not a parameter checkpoint")

    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"checkpoint {filename} has version {version}, expected {CHECKPOINT_VERSION}")

    digest = digest.decode("ascii")

    if expected_digest is not None and digest != expected_digest:
        raise CheckpointError(f"checkpoint {filename} was written for config {digest}, expected {expected_digest}")

    offset = HEADER.size
    shapes = []

    try:
        for _ in range(count):
            (length,) = struct.unpack_from("<I", payload, offset)
            offset += 4
            name = payload[offset:offset + length].decode("utf-8")
            offset += length
            (ndim,) = struct.unpack_from("<I", payload, offset)
            offset += 4
            shape = tuple(int(size) for size in np.frombuffer(payload, dtype="<i8", count=ndim, offset=offset))
            offset += 8 * ndim
            shapes.append((name, shape))

        state = OrderedDict()

        for name, shape in shapes:
            size = int(np.prod(shape, dtype=np.int64))
            state[name] = np.frombuffer(payload, dtype="<f8", count=size, offset=offset).reshape(shape).astype(np.float64)
            offset += 8 * size
    except (struct.error, ValueError) as e:
        raise CheckpointError(f"checkpoint {filename} is truncated or corrupt: {e}") from e

    if offset != len(payload):
        raise CheckpointError(f"checkpoint {filename} has {len(payload) - offset} trailing bytes")

    return state, digest
