import logging
from dataclasses import dataclass, field
from os import makedirs
from os.path import abspath, expanduser, join
from typing import List

import colored_logging as cl

from .dataset_manifest import DatasetManifest, SourceFile, load_manifest, write_manifest
from .digests import file_digest
from .exceptions import ConfigError
from .generic_CSV_loader import load_generic_csv_with_tally, write_generic_csv
from .raw_recording import RawRecording, corpus_digest
from .recording_runs import IngestTally
from .synthetic_corpus import SynthSpec, synth_generate, synthetic_manifest
from .timer import Timer
from .WISDM_loader import load_wisdm_with_tally

logger = logging.getLogger(__name__)

LOADERS = {
    "wisdm": load_wisdm_with_tally,
    "generic_csv": load_generic_csv_with_tally,
}


@dataclass
class Corpus:
    manifest: DatasetManifest
    recordings: List[RawRecording]
    digest: str
    source_digests: List[str] = field(default_factory=list)
    tallies: List[IngestTally] = field(default_factory=list)

    @property
    def num_samples(self) -> int:
        return int(sum(len(recording) for recording in self.recordings))


def load_manifest_corpus(manifest: DatasetManifest, source_digests: List[str] = None) -> Corpus:
    """
    Ingest every source file of a manifest in listed order.

    Raises:
        ConfigError: for manifests without a file loader (synthetic) or without source files.
    """
    if manifest.format not in LOADERS:
        raise ConfigError(f"manifest {manifest.name} has format '{manifest.format}', which has no file loader")

    if len(manifest.source_files) == 0:
        raise ConfigError(f"manifest {manifest.name} lists no source files")

    timer = Timer()
    recordings = []
    tallies = []

    for source in manifest.source_files:
        loaded, tally = LOADERS[manifest.format](source.path, manifest)
        recordings.extend(loaded)
        tallies.append(tally)

    corpus = Corpus(
        manifest=manifest,
        recordings=recordings,
        digest=corpus_digest(recordings),
        source_digests=list(source_digests or []),
        tallies=tallies,
    )
    logger.info(
        f"corpus {cl.name(manifest.name)}: {cl.val(len(recordings))} recordings, "
        f"{cl.val(corpus.num_samples)} samples ({cl.time(timer)} seconds)"
    )

    return corpus


def load_corpus_file(manifest_filename: str) -> Corpus:
    manifest = load_manifest(manifest_filename, verify=False)
    digests = manifest.verify_digests()

    return load_manifest_corpus(manifest, source_digests=digests)


def synthetic_corpus(spec: SynthSpec) -> Corpus:
    recordings = synth_generate(spec)

    return Corpus(manifest=synthetic_manifest(spec), recordings=recordings, digest=corpus_digest(recordings))


def load_corpus(source) -> Corpus:
    """Corpus named by a `DatasetSource`: a manifest on disk or an inline synthetic spec."""
    if source.synthetic is not None:
        return synthetic_corpus(source.synthetic)

    return load_corpus_file(source.manifest)


def write_synthetic_corpus(spec: SynthSpec, directory: str) -> str:
    """
    Write a synthetic corpus in the generic CSV schema next to a pinned manifest, so it can be
    read back through the same path as a 6-channel field corpus.

    Returns:
        str: filename of the manifest.
    """
    directory = abspath(expanduser(directory))
    makedirs(directory, exist_ok=True)
    recordings = synth_generate(spec)
    template = synthetic_manifest(spec)
    csv_filename = write_generic_csv(recordings, join(directory, f"{template.name}.csv"))

    manifest = DatasetManifest(
        name=template.name,
        class_names=template.class_names,
        channel_names=template.channel_names,
        sampling_note=template.sampling_note,
        source_files=[SourceFile(path=csv_filename, sha256=file_digest(csv_filename))],
        format="generic_csv",
    )
    filename = write_manifest(manifest, join(directory, f"{template.name}.yaml"))
    logger.info(f"wrote synthetic corpus {cl.name(template.name)} to {cl.dir(directory)}")

    return filename
