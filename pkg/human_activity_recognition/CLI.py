import sys
import logging
from dataclasses import replace
from glob import glob
from os.path import isdir, join
from typing import List, Optional

import colored_logging as cl

from human_activity_recognition import (
    __version__,
    AllModelsFailed,
    ConfigError,
    DigestConflict,
    EmptySelection,
    InputContractViolation,
    InvalidFeatureConfig,
    InvalidPreprocessConfig,
    ManifestDigestMismatch,
    ManifestMismatch,
    SegmentSelector,
    SynthSpec,
    UnknownModelKind,
    dump_features,
    emit_table,
    format_table,
    load_corpus_file,
    load_experiment_config,
    load_report,
    prepare_data,
    run_seed_sweep,
    write_synthetic_corpus,
    write_table,
)

from .parse_arguments import parse_arguments, parse_models, parse_seeds

logger = logging.getLogger(__name__)

# failures reported with exit code 1
CONFIGURATION_ERRORS = (
    ConfigError,
    DigestConflict,
    EmptySelection,
    InputContractViolation,
    InvalidFeatureConfig,
    InvalidPreprocessConfig,
    ManifestDigestMismatch,
    ManifestMismatch,
    UnknownModelKind,
)

TABLE_FILENAME = "results_table.csv"
TABLE_TEXT_FILENAME = "results_table.txt"


def print_version_and_exit() -> None:
    print(f"HAR CLI {__version__}")
    sys.exit(0)


def load_config(args):
    """Experiment document with the command-line overrides applied (seeds are applied per run)."""
    config = load_experiment_config(args.config)

    return config.with_overrides(
        output_directory=args.out,
        models=parse_models(args.models) if args.models else None,
        schedule=args.schedule,
        split_strategy=args.split,
    )


def ingest(args) -> int:
    corpus = load_corpus_file(args.manifest)

    for source, tally in zip(corpus.manifest.source_files, corpus.tallies):
        logger.info(f"{cl.dir(source.path)}: {tally.to_dict()}")

    logger.info(f"corpus digest {cl.val(corpus.digest)}")

    for source, digest in zip(corpus.manifest.source_files, corpus.source_digests):
        logger.info(f"sha256 {cl.val(digest)} {cl.dir(source.path)}")

    return 0


def synth(args) -> int:
    spec = SynthSpec()

    if args.config is not None:
        config = load_experiment_config(args.config)

        if config.dataset.synthetic is None:
            raise ConfigError(f"experiment {args.config} does not describe a synthetic dataset")

        spec = config.dataset.synthetic

    if args.seed is not None:
        spec = replace(spec, seed=args.seed)

    if args.channels is not None:
        spec = replace(spec, channels=args.channels)

    write_synthetic_corpus(spec, args.out)

    return 0


def preprocess(args) -> int:
    config = load_config(args)

    if args.seed is not None:
        config = config.with_overrides(seed=parse_seeds(args.seed)[0])

    data = prepare_data(config)
    logger.info(
        f"{cl.val(len(data.segments))} segments of shape {cl.val(data.input_shape)}, "
        f"split {cl.val(data.split.sizes)}"
    )

    return 0


def features(args) -> int:
    if args.features_command != "dump":
        raise ConfigError("features needs a subcommand: dump")

    config = load_config(args)

    if args.seed is not None:
        config = config.with_overrides(seed=parse_seeds(args.seed)[0])

    data = prepare_data(config)
    selector = SegmentSelector(class_name=args.class_name, segment_id=args.segment, limit=args.limit)
    directory = join(config.output_directory, config.name, "features")
    dump_features(data.store, selector, directory, data.corpus.manifest.channel_names)

    return 0


def experiment(args) -> int:
    config = load_config(args)
    seeds = parse_seeds(args.seed) if args.seed is not None else [config.seed]
    reports = run_seed_sweep(config, seeds, stage=args.command)

    if args.command != "train":
        table = emit_table(reports)
        directory = join(config.output_directory, config.name, config.training.schedule)
        write_table(table, join(directory, TABLE_FILENAME), join(directory, TABLE_TEXT_FILENAME))
        print(format_table(table))

    return 0


def report_files(paths: List[str]) -> List[str]:
    filenames = []

    for path in paths:
        if isdir(path):
            filenames.extend(sorted(glob(join(path, "**", "report.json"), recursive=True)))
        else:
            filenames.append(path)

    if not filenames:
        raise ConfigError(f"no reports found in {paths}")

    return filenames


def table(args) -> int:
    reports = [load_report(filename) for filename in report_files(args.reports)]
    merged = emit_table(reports, include_published=not args.no_published)

    if args.out is not None:
        write_table(merged, join(args.out, TABLE_FILENAME), join(args.out, TABLE_TEXT_FILENAME))

    print(format_table(merged))

    return 0


COMMANDS = {
    "ingest": ingest,
    "synth": synth,
    "preprocess": preprocess,
    "features": features,
    "train": experiment,
    "evaluate": experiment,
    "run": experiment,
    "table": table,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point for the HAR command-line interface.
    Accepts an optional argv list for testing or custom invocation.

    Returns:
        int: 0 on success, 1 for a configuration error, 2 when every model failed.
    """
    if argv is None:
        argv = sys.argv[1:]

    args = parse_arguments(argv)

    if args.version:
        print_version_and_exit()

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    if args.command is None:
        logger.error("no command given; see HAR --help")
        return 1

    try:
        return COMMANDS[args.command](args)
    except AllModelsFailed as e:
        logger.error(str(e))
        return 2
    except CONFIGURATION_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
