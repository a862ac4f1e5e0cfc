import logging
from dataclasses import dataclass, field
from os.path import abspath, dirname, exists, expanduser, isabs, join
from typing import List, Optional

import colored_logging as cl
import yaml

from .activity_label import ActivityLabel, normalize_class_name
from .digests import file_digest
from .exceptions import ConfigError, IngestError, ManifestDigestMismatch, UnknownActivity

logger = logging.getLogger(__name__)

MANIFEST_FORMATS = ("wisdm", "generic_csv", "synthetic")


@dataclass
class SourceFile:
    path: str
    sha256: Optional[str] = None


@dataclass
class DatasetManifest:
    """
    Names the classes, channels and source files of a corpus.
    The class-name order fixes the label <-> index mapping for every report.
    """
    name: str
    class_names: List[str]
    channel_names: List[str]
    num_classes: Optional[int] = None
    sampling_note: str = ""
    source_files: List[SourceFile] = field(default_factory=list)
    format: str = "wisdm"

    def __post_init__(self):
        self.class_names = [str(name).strip() for name in self.class_names]
        self.channel_names = [str(name).strip() for name in self.channel_names]

        if self.num_classes is None:
            self.num_classes = len(self.class_names)

        if self.num_classes != len(self.class_names):
            raise ConfigError(
                f"manifest {self.name} declares {self.num_classes} classes but names {len(self.class_names)}"
            )

        if self.format not in MANIFEST_FORMATS:
            raise ConfigError(f"manifest format must be one of {MANIFEST_FORMATS}, got '{self.format}'")

        keys = [normalize_class_name(name) for name in self.class_names]

        if len(set(keys)) != len(keys):
            raise ConfigError(f"manifest {self.name} has duplicate class names: {self.class_names}")

        self._lookup = {key: index for index, key in enumerate(keys)}

    @property
    def labels(self) -> List[ActivityLabel]:
        return [ActivityLabel(index, name) for index, name in enumerate(self.class_names)]

    def label(self, name: str) -> ActivityLabel:
        """
        Resolve an activity name (case-insensitive, trimmed) to its canonical label.

        Raises:
            UnknownActivity: if the name is not one of the manifest's classes.
        """
        key = normalize_class_name(name)

        if key not in self._lookup:
            raise UnknownActivity(
                f"unknown activity '{name}' for dataset {self.name} (expected one of {self.class_names})"
            )

        index = self._lookup[key]

        return ActivityLabel(index, self.class_names[index])

    def label_from_index(self, index: int) -> ActivityLabel:
        return ActivityLabel(int(index), self.class_names[int(index)])

    @classmethod
    def from_dict(cls, document: dict, base_directory: str = ".") -> "DatasetManifest":
        allowed = {"name", "class_names", "channel_names", "num_classes", "sampling_note", "source_files", "format"}
        unknown = set(document) - allowed

        if unknown:
            raise ConfigError(f"unknown manifest keys: {sorted(unknown)}")

        source_files = []

        for entry in document.get("source_files", []) or []:
            if isinstance(entry, str):
                entry = {"path": entry}

            path = expanduser(entry["path"])

            if not isabs(path):
                path = abspath(join(base_directory, path))

            source_files.append(SourceFile(path=path, sha256=entry.get("sha256")))

        try:
            return cls(
                name=document["name"],
                class_names=list(document["class_names"]),
                channel_names=list(document["channel_names"]),
                num_classes=document.get("num_classes"),
                sampling_note=document.get("sampling_note", ""),
                source_files=source_files,
                format=document.get("format", "wisdm"),
            )
        except KeyError as e:
            raise ConfigError(f"manifest is missing required key {e}") from e

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "format": self.format,
            "num_classes": self.num_classes,
            "class_names": list(self.class_names),
            "channel_names": list(self.channel_names),
            "sampling_note": self.sampling_note,
            "source_files": [{"path": source.path, "sha256": source.sha256} for source in self.source_files],
        }

    def verify_digests(self) -> List[str]:
        """
        Recompute the digest of every source file.
        Pinned digests must match; unpinned ones are logged so they can be pinned.

        Returns:
            List[str]: the recomputed digests in source-file order.
        """
        digests = []

        for source in self.source_files:
            if not exists(source.path):
                raise IngestError(f"source file of dataset {self.name} not found: {source.path}")

            digest = file_digest(source.path)

            if source.sha256 is None:
                logger.warning(f"unpinned source file {cl.dir(source.path)} has sha256 {cl.val(digest)}")
            elif source.sha256.lower() != digest:
                raise ManifestDigestMismatch(
                    f"sha256 of {source.path} is {digest}, manifest {self.name} expects {source.sha256}"
                )

            digests.append(digest)

        return digests


def load_manifest(filename: str, verify: bool = True) -> DatasetManifest:
    """
    Read a YAML manifest document; relative source paths resolve against its directory.
    """
    filename = abspath(expanduser(filename))

    try:
        with open(filename, "r", encoding="utf-8") as file:
            document = yaml.safe_load(file)
    except OSError as e:
        raise ConfigError(f"unable to read manifest {filename}: {e}") from e

    if not isinstance(document, dict):
        raise ConfigError(f"manifest {filename} is not a key/value document")

    manifest = DatasetManifest.from_dict(document, base_directory=dirname(filename))

    if verify:
        manifest.verify_digests()

    logger.info(
        f"loaded manifest {cl.name(manifest.name)} with {cl.val(manifest.num_classes)} classes "
        f"and {cl.val(len(manifest.channel_names))} channels"
    )

    return manifest


def write_manifest(manifest: DatasetManifest, filename: str) -> str:
    filename = abspath(expanduser(filename))
    document = manifest.to_dict()
    base = dirname(filename)

    # store paths relative to the manifest when they live beside it
    for source in document["source_files"]:
        if source["path"].startswith(base + "/"):
            source["path"] = source["path"][len(base) + 1:]

    with open(filename, "w", encoding="utf-8") as file:
        yaml.safe_dump(document, file, sort_keys=False)

    return filename
