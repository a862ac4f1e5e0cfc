"""
Experiment reports.

A report is written as sorted-key JSON. Wall-clock durations live only under the top-level
"timing" key, so two runs of the same configuration and seed differ only there.
"""
import json
import logging
from dataclasses import dataclass, field
from os import makedirs, replace
from os.path import dirname, expanduser
from typing import Dict, List, Optional

import colored_logging as cl
import numpy as np

from .confusion import confusion_accuracy
from .constants import REPORT_FORMAT_VERSION
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

MODEL_STATUSES = ("ok", "failed")


@dataclass
class ModelResult:
    kind: str
    status: str = "ok"
    test_accuracy: Optional[float] = None
    confusion: Optional[List[List[int]]] = None
    hyperparameters: Dict = field(default_factory=dict)
    num_parameters: int = 0
    best_epoch: Optional[int] = None
    best_val_accuracy: Optional[float] = None
    history_path: Optional[str] = None
    model_path: Optional[str] = None
    confusion_path: Optional[str] = None
    error: Optional[str] = None
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "status": self.status,
            "test_accuracy": self.test_accuracy,
            "confusion": self.confusion,
            "hyperparameters": self.hyperparameters,
            "num_parameters": self.num_parameters,
            "best_epoch": self.best_epoch,
            "best_val_accuracy": self.best_val_accuracy,
            "history_path": self.history_path,
            "model_path": self.model_path,
            "confusion_path": self.confusion_path,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, document: dict, seconds: float = 0.0) -> "ModelResult":
        return cls(seconds=seconds, **document)


@dataclass
class ExperimentReport:
    name: str
    dataset: str
    schedule: str
    seed: int
    split_seed: int
    split_strategy: str
    config_digest: str
    section_digests: Dict[str, str]
    corpus_digest: str
    tool_version: str
    class_names: List[str]
    split_sizes: Dict[str, int]
    segment_count: int
    published_dataset: Optional[str] = None
    published_record_count: Optional[int] = None
    source_digests: List[str] = field(default_factory=list)
    provenance: List[dict] = field(default_factory=list)
    models: List[ModelResult] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)
    format_version: int = REPORT_FORMAT_VERSION

    @property
    def succeeded(self) -> List[ModelResult]:
        return [result for result in self.models if result.status == "ok"]

    @property
    def best_model(self) -> Optional[ModelResult]:
        """Most accurate successful model; ties go to the earlier listed model."""
        best = None

        for result in self.succeeded:
            if best is None or result.test_accuracy > best.test_accuracy:
                best = result

        return best

    def accuracies(self) -> Dict[str, float]:
        return {result.kind: result.test_accuracy for result in self.succeeded}

    def check_consistency(self) -> None:
        """Accuracy must equal trace / total of the confusion matrix for every model."""
        for result in self.succeeded:
            matrix = np.array(result.confusion, dtype=np.int64)

            if confusion_accuracy(matrix) != result.test_accuracy:
                raise ValueError(
                    f"{result.kind}: accuracy {result.test_accuracy} differs from confusion trace/total {confusion_accuracy(matrix)}"
                )

    def to_dict(self, include_timing: bool = True) -> dict:
        document = {
            "format_version": self.format_version,
            "name": self.name,
            "dataset": self.dataset,
            "published_dataset": self.published_dataset,
            "schedule": self.schedule,
            "seed": self.seed,
            "split_seed": self.split_seed,
            "split_strategy": self.split_strategy,
            "config_digest": self.config_digest,
            "section_digests": dict(self.section_digests),
            "corpus_digest": self.corpus_digest,
            "source_digests": list(self.source_digests),
            "tool_version": self.tool_version,
            "class_names": list(self.class_names),
            "split_sizes": dict(self.split_sizes),
            "segment_count": self.segment_count,
            "published_record_count": self.published_record_count,
            "provenance": list(self.provenance),
            "models": [result.to_dict() for result in self.models],
        }

        if include_timing:
            document["timing"] = {
                **{f"stage.{name}": seconds for name, seconds in self.timing.items()},
                **{f"model.{result.kind}": result.seconds for result in self.models},
            }

        return document

    @classmethod
    def from_dict(cls, document: dict) -> "ExperimentReport":
        if document.get("format_version") != REPORT_FORMAT_VERSION:
            raise ConfigError(f"unsupported report format {document.get('format_version')}")

        timing = document.get("timing", {})
        fields = {key: value for key, value in document.items() if key not in ("models", "timing")}

        return cls(
            models=[
                ModelResult.from_dict(entry, seconds=timing.get(f"model.{entry['kind']}", 0.0))
                for entry in document.get("models", [])
            ],
            timing={key[len("stage."):]: value for key, value in timing.items() if key.startswith("stage.")},
            **fields,
        )


def write_report(report: ExperimentReport, filename: str) -> str:
    filename = expanduser(filename)

    if dirname(filename):
        makedirs(dirname(filename), exist_ok=True)

    temporary = f"{filename}.tmp"

    with open(temporary, "w") as file:
        json.dump(report.to_dict(), file, sort_keys=True, indent=2)
        file.write("\n")

    replace(temporary, filename)
    logger.info(f"wrote report of {cl.val(len(report.models))} models to {cl.dir(filename)}")

    return filename


def load_report(filename: str) -> ExperimentReport:
    filename = expanduser(filename)

    try:
        with open(filename, "r") as file:
            document = json.load(file)
    except (OSError, ValueError) as e:
        raise ConfigError(f"unable to read report {filename}: {e}") from e

    return ExperimentReport.from_dict(document)
