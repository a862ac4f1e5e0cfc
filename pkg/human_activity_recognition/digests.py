import hashlib
import json
from dataclasses import asdict, is_dataclass
from typing import Any

import numpy as np

CHUNK_SIZE = 1 << 20


def file_digest(filename: str) -> str:
    """SHA-256 of a file's raw bytes."""
    digest = hashlib.sha256()

    with open(filename, "rb") as file:
        for chunk in iter(lambda: file.read(CHUNK_SIZE), b""):
            digest.update(chunk)

    return digest.hexdigest()


def _canonical(value: Any) -> Any:
    if is_dataclass(value) and not isinstance(value, type):
        return _canonical(asdict(value))
    if isinstance(value, dict):
        return {str(key): _canonical(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(item) for item in value]
    if isinstance(value, np.ndarray):
        return _canonical(value.tolist())
    if isinstance(value, np.generic):
        return value.item()

    return value


def canonical_json(value: Any) -> str:
    return json.dumps(_canonical(value), sort_keys=True, separators=(",", ":"))


def config_digest(value: Any) -> str:
    """SHA-256 over the canonical (sorted-key) JSON form of a config record or mapping."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def bytes_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
