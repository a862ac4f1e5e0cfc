import sys
import argparse
from typing import List, Optional

from .exceptions import ConfigError


def parse_seeds(text: str) -> List[int]:
    """
    Comma-separated seed list, e.g. "0" or "0,1,2".

    Raises:
        ConfigError: for an empty or non-integer entry.
    """
    try:
        seeds = [int(item) for item in str(text).split(",") if item.strip()]
    except ValueError as e:
        raise ConfigError(f"seeds must be comma-separated integers, got '{text}'") from e

    if not seeds:
        raise ConfigError("no seed given")

    return seeds


def parse_models(text: str) -> List[str]:
    return [item.strip().lower() for item in str(text).split(",") if item.strip()]


def _add_experiment_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-c", "--config", type=str, required=True, help="Experiment document (YAML)"
    )

    parser.add_argument(
        "--seed", type=str, default=None, help="Seed, or comma-separated seeds for a sweep"
    )

    parser.add_argument(
        "-o", "--out", type=str, default=None, help="Output directory, overriding the document"
    )

    parser.add_argument(
        "--models", type=str, default=None, help="Comma-separated model kinds to run"
    )

    parser.add_argument(
        "--schedule", type=str, default=None, help="Training schedule: ce, supcon or triplet"
    )

    parser.add_argument(
        "--split", type=str, default=None, help="Split strategy: stratified or by-user"
    )


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command-line arguments for the human activity recognition workbench.

    Args:
        argv (Optional[List[str]]): List of command-line arguments. Defaults to sys.argv.

    Returns:
        argparse.Namespace: Parsed arguments; `command` names the subcommand.
    """
    if argv is None:
        argv = sys.argv[1:]

    parser = argparse.ArgumentParser(
        prog="HAR",
        description="Human activity recognition benchmark workbench"
    )

    # Show version and exit
    parser.add_argument(
        "--version", action="store_true", help="Show the version and exit"
    )

    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log at DEBUG level"
    )

    subparsers = parser.add_subparsers(dest="command")

    ingest = subparsers.add_parser("ingest", help="Load a corpus and report its tallies and digests")
    ingest.add_argument("manifest", type=str, help="Dataset manifest (YAML)")

    synth = subparsers.add_parser("synth", help="Write a synthetic corpus and its manifest")
    synth.add_argument("-c", "--config", type=str, default=None, help="Experiment document with a synthetic dataset")
    synth.add_argument("-o", "--out", type=str, required=True, help="Directory for the corpus and manifest")
    synth.add_argument("--seed", type=int, default=None, help="Generator seed")
    synth.add_argument("--channels", type=int, default=None, help="Channels per recording")

    preprocess = subparsers.add_parser("preprocess", help="Segment, split and normalize a corpus")
    _add_experiment_arguments(preprocess)

    features = subparsers.add_parser("features", help="Feature operations")
    feature_commands = features.add_subparsers(dest="features_command")
    dump = feature_commands.add_parser("dump", help="Write plot-ready feature dumps of selected segments")
    _add_experiment_arguments(dump)
    dump.add_argument("--class", dest="class_name", type=str, default=None, help="Activity class to select")
    dump.add_argument("--segment", type=int, default=None, help="Segment id to select")
    dump.add_argument("--limit", type=int, default=1, help="Number of segments of the class to dump")

    for name, description in (
            ("train", "Fit or train every model and save it"),
            ("evaluate", "Reload trained models and score the test split"),
            ("run", "Train and evaluate every model and write the report")):
        _add_experiment_arguments(subparsers.add_parser(name, help=description))

    table = subparsers.add_parser("table", help="Merge reports into an accuracy table")
    table.add_argument("reports", nargs="+", type=str, help="Report files or directories holding them")
    table.add_argument("-o", "--out", type=str, default=None, help="Directory for the table files")
    table.add_argument("--no-published", action="store_true", help="Leave out the published comparison columns")

    return parser.parse_args(argv)
