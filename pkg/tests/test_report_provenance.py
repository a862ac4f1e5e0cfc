import json

import pytest

from human_activity_recognition import (
    DESIGN_DECISIONS,
    ConfigError,
    ExperimentReport,
    ModelResult,
    check_provenance,
    load_report,
    provenance_block,
    write_report,
)


def make_report(models=None, timing=None):
    return ExperimentReport(
        name="unit",
        dataset="synthetic-3x3-seed7",
        schedule="ce_only",
        seed=0,
        split_seed=0,
        split_strategy="segment_stratified",
        config_digest="a" * 64,
        section_digests={"dataset": "b" * 64},
        corpus_digest="c" * 64,
        tool_version="1.0.0",
        class_names=["class_0", "class_1"],
        split_sizes={"train": 7, "val": 1, "test": 2},
        segment_count=10,
        provenance=provenance_block(),
        models=models or [],
        timing=timing or {},
    )


def ok(kind, accuracy, confusion, seconds=0.0):
    return ModelResult(kind=kind, test_accuracy=accuracy, confusion=confusion, seconds=seconds)


def test_decision_keys_are_unique():
    keys = [decision.key for decision in DESIGN_DECISIONS]

    assert len(keys) == len(set(keys))
    assert len(provenance_block()) == len(DESIGN_DECISIONS)


def test_complete_provenance_passes():
    assert check_provenance(make_report().to_dict()) == []


def test_missing_or_altered_decision_is_named():
    document = make_report().to_dict()
    removed = document["provenance"].pop(0)
    document["provenance"][0] = {**document["provenance"][0], "text": "something else"}

    assert check_provenance(document) == [removed["key"], DESIGN_DECISIONS[1].key]


def test_report_round_trip_keeps_timing_separate(tmp_path):
    report = make_report(
        models=[ok("knn", 0.5, [[1, 0], [1, 0]], seconds=1.25)],
        timing={"prepare": 2.5},
    )
    filename = write_report(report, str(tmp_path / "report.json"))
    document = json.loads((tmp_path / "report.json").read_text())

    assert document["timing"] == {"stage.prepare": 2.5, "model.knn": 1.25}
    assert "seconds" not in document["models"][0]

    loaded = load_report(filename)
    assert loaded.to_dict() == report.to_dict()
    assert loaded.models[0].seconds == 1.25
    assert "timing" not in loaded.to_dict(include_timing=False)


def test_consistency_between_accuracy_and_confusion():
    make_report(models=[ok("knn", 0.75, [[2, 0], [1, 1]])]).check_consistency()

    with pytest.raises(ValueError):
        make_report(models=[ok("knn", 0.8, [[2, 0], [1, 1]])]).check_consistency()


def test_best_model_skips_failures_and_keeps_the_first_of_a_tie():
    report = make_report(models=[
        ModelResult(kind="svm", status="failed", error="ValueError: boom"),
        ok("knn", 0.75, [[2, 0], [1, 1]]),
        ok("rf", 0.75, [[2, 0], [1, 1]]),
        ok("dt", 0.5, [[1, 1], [1, 1]]),
    ])

    assert report.best_model.kind == "knn"
    assert report.accuracies() == {"knn": 0.75, "rf": 0.75, "dt": 0.5}


def test_unsupported_report_format(tmp_path):
    filename = tmp_path / "report.json"
    filename.write_text(json.dumps({"format_version": 99}))

    with pytest.raises(ConfigError):
        load_report(str(filename))

    with pytest.raises(ConfigError):
        load_report(str(tmp_path / "absent.json"))
