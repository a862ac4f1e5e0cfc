"""
Config-driven experiment runs.

A run lives in `<output_directory>/<name>/<schedule>/seed_<seed>/`:

    models/<kind>.ckpt | models/<kind>.json   trained parameters
    history/<kind>.csv                       per-epoch loss and validation accuracy (neural)
    confusion/<kind>.csv                     test confusion matrix per model
    best_confusion.csv, best_confusion.txt   confusion matrix of the most accurate model
    report.json                              ExperimentReport

Paths recorded in the report are relative to the run directory.
"""
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from os.path import exists, join
from typing import List, Optional

import colored_logging as cl
import numpy as np

from .confusion import confusion_accuracy, confusion_matrix, write_confusion
from .constants import PUBLISHED_RECORD_COUNTS
from .corpus_source import Corpus, load_corpus
from .design_decisions import provenance_block
from .digests import config_digest
from .evaluation import predict_ids
from .exceptions import AllModelsFailed, CheckpointError, ConfigError
from .experiment_config import ExperimentConfig
from .experiment_report import ExperimentReport, ModelResult, write_report
from .feature_store import FeatureStore
from .model_spec import InputShape, ModelSpec
from .model_zoo import (
    Model,
    build,
    fit_classical,
    load_classical_model,
    load_neural_model,
    save_classical_model,
    save_neural_model,
)
from .normalization import NormalizationStats
from .preprocessing import preprocess_pipeline
from .segment_cache import load_segment_cache, save_segment_cache, segment_cache_path
from .segmentation import segment_recordings
from .segments import Segment
from .split_assignment import SplitAssignment, stratified_split
from .timer import Timer
from .training_loop import train, write_history
from .version import __version__

logger = logging.getLogger(__name__)

STAGES = ("train", "evaluate", "run")
REPORT_FILENAME = "report.json"


@dataclass
class PreparedData:
    corpus: Corpus
    segments: List[Segment]
    stats: Optional[NormalizationStats]
    split: SplitAssignment
    store: FeatureStore

    @property
    def class_names(self) -> List[str]:
        return list(self.corpus.manifest.class_names)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def input_shape(self) -> InputShape:
        return InputShape(
            window_size=self.store.window_size,
            channels=self.store.num_channels,
            scales=self.store.num_scales,
        )


def run_directory(config: ExperimentConfig) -> str:
    return join(config.output_directory, config.name, config.training.schedule, f"seed_{config.seed}")


def derive_seed(seed: int, kind: str) -> int:
    """Per-model seed, stable across processes and independent of model order."""
    return (int(seed) * 1_000_003 + zlib.crc32(kind.encode("utf-8"))) % (2 ** 31)


def model_digest(config: ExperimentConfig, spec: ModelSpec) -> str:
    """Digest binding a checkpoint to everything that shaped it, so a model subset can be evaluated alone."""
    sections = config.sections()
    sections.pop("models")

    return config_digest({**sections, "model": spec.to_dict(), "seed": config.seed, "split_seed": config.split.seed})


def model_filename(spec: ModelSpec) -> str:
    return join("models", f"{spec.kind}.ckpt" if spec.is_neural else f"{spec.kind}.json")


def _preprocessing_key(config: ExperimentConfig) -> str:
    # normalization is fitted on the training split, so the split takes part in the key
    return config_digest({
        "preprocess": config.preprocess,
        "split": {"strategy": config.split.strategy, "ratios": list(config.split.ratios), "seed": config.split.seed},
    })


def prepare_data(config: ExperimentConfig, corpus: Corpus = None) -> PreparedData:
    """
    Ingest, segment, split, then preprocess with statistics fitted on the training split.

    Segment ids are assigned before smoothing and normalization and survive both, so the split
    computed on raw windows indexes the preprocessed segments.
    """
    if corpus is None:
        corpus = load_corpus(config.dataset)

    raw_segments = segment_recordings(corpus.recordings, config.preprocess)
    split = stratified_split(raw_segments, config.split.ratios, seed=config.split.seed, strategy=config.split.strategy)
    key = _preprocessing_key(config)
    cached = None

    if config.cache_directory is not None:
        cache_filename = segment_cache_path(config.cache_directory, corpus.digest, key)
        cached = load_segment_cache(cache_filename, corpus.digest, key)

    if cached is not None:
        segments, stats = cached
        logger.info(f"loaded {cl.val(len(segments))} preprocessed segments from cache")
    else:
        segments, stats = preprocess_pipeline(corpus.recordings, config.preprocess, train_ids=split.train, workers=config.workers)

        if config.cache_directory is not None and stats is not None:
            save_segment_cache(
                cache_filename,
                segments,
                stats,
                corpus.digest,
                key,
                corpus.manifest.class_names,
                corpus.manifest.channel_names,
            )

    store = FeatureStore(
        segments,
        config.features,
        cache_directory=None if config.cache_directory is None else join(config.cache_directory, "spectral"),
        cache_key=config_digest({"corpus": corpus.digest, "preprocessing": key, "features": config.features}),
    )

    return PreparedData(corpus=corpus, segments=segments, stats=stats, split=split, store=store)


def resolve_spec(spec: ModelSpec, data: PreparedData) -> ModelSpec:
    return spec.with_input_shape(data.input_shape, data.num_classes)


def fit_model(spec: ModelSpec, data: PreparedData, config: ExperimentConfig, directory: str) -> ModelResult:
    """
    Fit or train one model on the training split and persist it (and its history) under `directory`.
    """
    spec = resolve_spec(spec, data)
    seed = derive_seed(config.seed, spec.kind)
    model = build(spec, seed=seed)
    digest = model_digest(config, spec)
    result = ModelResult(kind=spec.kind, hyperparameters=dict(spec.hyperparameters), model_path=model_filename(spec))

    if spec.is_neural:
        history_path = join("history", f"{spec.kind}.csv")
        trained = train(model, data.store, data.split, config.training.replace(seed=seed))
        write_history(trained.history, join(directory, history_path))
        save_neural_model(join(directory, result.model_path), trained.model, digest)
        result.history_path = history_path
        result.best_epoch = trained.best_epoch
        result.best_val_accuracy = trained.best_val_accuracy
        result.num_parameters = trained.model.num_parameters()
    else:
        train_ids = np.array(data.split.train, dtype=np.int64)
        fit_classical(model, data.store.statistical(train_ids), data.store.labels(train_ids))
        save_classical_model(join(directory, result.model_path), model, digest)
        result.num_parameters = model.num_parameters()

    return result


def load_trained_model(spec: ModelSpec, data: PreparedData, config: ExperimentConfig, directory: str) -> Model:
    """
    Raises:
        CheckpointError: if the model was not trained under this configuration and seed.
    """
    spec = resolve_spec(spec, data)
    filename = join(directory, model_filename(spec))

    if not exists(filename):
        raise CheckpointError(f"no trained {spec.kind} model at {filename}; run the train stage first")

    digest = model_digest(config, spec)

    if spec.is_neural:
        return load_neural_model(filename, spec, expected_digest=digest)

    return load_classical_model(filename, expected_digest=digest)


def evaluate_model(model: Model, result: ModelResult, data: PreparedData, directory: str) -> ModelResult:
    """Score the test split once; accuracy is the confusion matrix's trace over its total."""
    predictions, labels = predict_ids(model, data.store, data.split.test)
    matrix = confusion_matrix(predictions, labels, num_classes=data.num_classes)
    result.confusion_path = join("confusion", f"{result.kind}.csv")
    write_confusion(matrix, join(directory, result.confusion_path), data.class_names)
    result.confusion = matrix.tolist()
    result.test_accuracy = confusion_accuracy(matrix)

    if result.num_parameters == 0 and hasattr(model, "num_parameters"):
        result.num_parameters = int(model.num_parameters())

    logger.info(f"{cl.name(result.kind)} test accuracy {cl.val(f'{result.test_accuracy:.4f}')}")

    return result


def run_model(spec: ModelSpec, data: PreparedData, config: ExperimentConfig, directory: str, stage: str = "run") -> ModelResult:
    """
    One model through the requested stage. Any failure is logged and recorded on the result
    instead of propagating, so the remaining models still run.
    """
    timer = Timer()

    try:
        if stage == "evaluate":
            model = load_trained_model(spec, data, config, directory)
            result = ModelResult(kind=spec.kind, hyperparameters=dict(spec.hyperparameters), model_path=model_filename(spec))
        else:
            result = fit_model(spec, data, config, directory)
            model = load_trained_model(spec, data, config, directory) if stage == "run" else None

        if model is not None:
            evaluate_model(model, result, data, directory)
    except Exception as e:
        logger.exception(f"{spec.kind} failed during {stage}")
        result = ModelResult(kind=spec.kind, status="failed", hyperparameters=dict(spec.hyperparameters), error=f"{type(e).__name__}: {e}")

    result.seconds = timer.duration
    logger.info(f"{cl.name(spec.kind)} {result.status} ({cl.time(timer)} seconds)")

    return result


def assemble_report(config: ExperimentConfig, data: PreparedData, results: List[ModelResult], timing: dict) -> ExperimentReport:
    published_dataset = config.dataset.published_dataset

    return ExperimentReport(
        name=config.name,
        dataset=data.corpus.manifest.name,
        schedule=config.training.schedule,
        seed=config.seed,
        split_seed=config.split.seed,
        split_strategy=config.split.strategy,
        config_digest=config.digest,
        section_digests=config.section_digests(),
        corpus_digest=data.corpus.digest,
        tool_version=__version__,
        class_names=data.class_names,
        split_sizes=dict(zip(("train", "val", "test"), data.split.sizes)),
        segment_count=len(data.segments),
        published_dataset=published_dataset,
        published_record_count=PUBLISHED_RECORD_COUNTS.get(published_dataset),
        source_digests=list(data.corpus.source_digests),
        provenance=provenance_block(),
        models=results,
        timing=timing,
    )


def write_best_confusion(report: ExperimentReport, directory: str) -> Optional[str]:
    best = report.best_model

    if best is None or best.confusion is None:
        return None

    logger.info(f"most accurate model: {cl.name(best.kind)} ({cl.val(f'{best.test_accuracy:.4f}')})")

    return write_confusion(
        np.array(best.confusion, dtype=np.int64),
        join(directory, "best_confusion.csv"),
        report.class_names,
        text_filename=join(directory, "best_confusion.txt"),
    )


def run_experiment(config: ExperimentConfig, stage: str = "run", data: PreparedData = None, timing: dict = None) -> ExperimentReport:
    """
    Run every model of `config` through `stage` and write the report.

    Args:
        config (ExperimentConfig): validated experiment.
        stage (str): "train" fits and saves models, "evaluate" reloads and scores them,
            "run" does both.
        data (PreparedData): prepared corpus, reused across seeds of a sweep when the split seed
            does not change. Prepared from `config` when omitted.
        timing (dict): stage durations already measured by the caller.

    Returns:
        ExperimentReport: written to `<run directory>/report.json`.

    Raises:
        ConfigError: for an unknown stage.
        AllModelsFailed: after the report is written, when no model succeeded.
    """
    if stage not in STAGES:
        raise ConfigError(f"stage must be one of {STAGES}, got '{stage}'")

    config.validate()
    directory = run_directory(config)
    timing = dict(timing or {})
    logger.info(
        f"experiment {cl.name(config.name)} stage {cl.name(stage)} schedule {cl.name(config.training.schedule)} "
        f"seed {cl.val(config.seed)} into {cl.dir(directory)}"
    )

    if data is None:
        with Timer() as timer:
            data = prepare_data(config)

        timing["prepare"] = timer.duration

    with Timer() as timer:
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as executor:
                results = list(executor.map(lambda spec: run_model(spec, data, config, directory, stage), config.models))
        else:
            results = [run_model(spec, data, config, directory, stage) for spec in config.models]

    timing["models"] = timer.duration
    report = assemble_report(config, data, results, timing)

    if stage != "train":
        report.check_consistency()
        write_best_confusion(report, directory)

    write_report(report, join(directory, REPORT_FILENAME))

    failed = [result.kind for result in results if result.status != "ok"]

    if failed:
        logger.warning(f"{cl.val(len(failed))} of {cl.val(len(results))} models failed: {', '.join(failed)}")

    if len(failed) == len(results):
        raise AllModelsFailed(f"all {len(results)} models failed: {', '.join(failed)}")

    return report


def run_seed_sweep(config: ExperimentConfig, seeds: List[int], stage: str = "run") -> List[ExperimentReport]:
    """One report per seed; each seed drives both the split and the model initializations."""
    corpus = load_corpus(config.dataset)
    reports = []

    for seed in seeds:
        seeded = config.with_overrides(seed=seed)

        with Timer() as timer:
            data = prepare_data(seeded, corpus=corpus)

        reports.append(run_experiment(seeded, stage=stage, data=data, timing={"prepare": timer.duration}))

    return reports
