import numpy as np
import pandas as pd
import pytest

from human_activity_recognition import (
    DigestConflict,
    ExperimentReport,
    ModelResult,
    emit_table,
    format_table,
    write_table,
)

SECTIONS = {"dataset": "d" * 64, "preprocess": "p" * 64, "features": "f" * 64, "split": "s" * 64, "training": "t" * 64}


def report(accuracies, seed=0, schedule="ce_only", dataset="wisdm-v1.1", published_dataset=None, sections=None, failed=()):
    models = [ModelResult(kind=kind, test_accuracy=accuracy) for kind, accuracy in accuracies.items()]
    models += [ModelResult(kind=kind, status="failed", error="ShapeMismatch: too short") for kind in failed]

    return ExperimentReport(
        name="table",
        dataset=dataset,
        schedule=schedule,
        seed=seed,
        split_seed=seed,
        split_strategy="segment_stratified",
        config_digest=str(seed) * 64,
        section_digests=dict(sections or SECTIONS),
        corpus_digest="c" * 64,
        tool_version="1.0.0",
        class_names=["a", "b"],
        split_sizes={"train": 7, "val": 1, "test": 2},
        segment_count=10,
        published_dataset=published_dataset,
        models=models,
    )


def test_single_report_gives_one_column():
    table = emit_table([report({"lstm": 0.8, "knn": 0.6})])

    assert table.index.name == "model"
    assert table.index.tolist() == ["KNN", "LSTM"]
    assert table.columns.tolist() == ["wisdm-v1.1/ce_only", "wisdm-v1.1/ce_only ±"]
    assert table.loc["LSTM", "wisdm-v1.1/ce_only"] == 0.8
    assert table.loc["KNN", "wisdm-v1.1/ce_only ±"] == 0.0


def test_seed_sweep_collapses_to_mean_and_half_range():
    table = emit_table([report({"knn": 0.90}, seed=0), report({"knn": 0.94}, seed=1)])

    assert table.loc["KNN", "wisdm-v1.1/ce_only"] == pytest.approx(0.92)
    assert table.loc["KNN", "wisdm-v1.1/ce_only ±"] == pytest.approx(0.02)


def test_published_columns_for_a_named_dataset():
    table = emit_table([
        report({"knn": 0.90}, seed=0, published_dataset="DS1"),
        report({"knn": 0.94}, seed=1, published_dataset="DS1"),
    ])

    assert table.columns.tolist() == ["DS1/ce_only", "DS1/ce_only ±", "DS1/ce_only published", "DS1/ce_only delta"]
    assert table.loc["KNN", "DS1/ce_only published"] == 0.935
    assert table.loc["KNN", "DS1/ce_only delta"] == pytest.approx(-0.015)

    bare = emit_table([report({"knn": 0.9}, published_dataset="DS1")], include_published=False)
    assert bare.columns.tolist() == ["DS1/ce_only", "DS1/ce_only ±"]


def test_kinds_without_a_published_value_get_nan():
    table = emit_table([report({"knn": 0.9}, schedule="supcon_then_ce", published_dataset="DS1")])

    assert np.isnan(table.loc["KNN", "DS1/supcon_then_ce published"])
    assert np.isnan(table.loc["KNN", "DS1/supcon_then_ce delta"])


def test_schedules_become_separate_columns_and_gaps_are_nan():
    table = emit_table([
        report({"knn": 0.9, "lstm": 0.8}),
        report({"lstm": 0.85}, schedule="supcon_then_ce"),
    ])

    assert table.columns.tolist() == [
        "wisdm-v1.1/ce_only", "wisdm-v1.1/ce_only ±",
        "wisdm-v1.1/supcon_then_ce", "wisdm-v1.1/supcon_then_ce ±",
    ]
    assert np.isnan(table.loc["KNN", "wisdm-v1.1/supcon_then_ce"])
    assert "-" in format_table(table)


def test_failed_models_are_left_out():
    table = emit_table([report({"knn": 0.9}, failed=["cnn1d"])])

    assert table.index.tolist() == ["KNN"]


def test_reports_of_one_dataset_must_share_their_sections():
    changed = {**SECTIONS, "preprocess": "q" * 64, "training": "u" * 64}

    with pytest.raises(DigestConflict) as error:
        emit_table([report({"knn": 0.9}), report({"knn": 0.8}, seed=1, sections=changed)])

    assert error.value.sections == ["preprocess"]


def test_different_datasets_may_differ():
    other = {**SECTIONS, "dataset": "e" * 64, "preprocess": "q" * 64}
    table = emit_table([report({"knn": 0.9}), report({"knn": 0.7}, dataset="generic", sections=other)])

    assert table.columns.tolist() == ["wisdm-v1.1/ce_only", "wisdm-v1.1/ce_only ±", "generic/ce_only", "generic/ce_only ±"]


def test_empty_report_list():
    with pytest.raises(ValueError):
        emit_table([])


def test_format_and_write(tmp_path):
    table = emit_table([report({"knn": 0.91234})])

    assert "0.912" in format_table(table)

    write_table(table, str(tmp_path / "out" / "table.csv"), text_filename=str(tmp_path / "out" / "table.txt"))
    written = pd.read_csv(tmp_path / "out" / "table.csv", index_col=0)

    assert written.loc["KNN", "wisdm-v1.1/ce_only"] == pytest.approx(0.91234)
    assert (tmp_path / "out" / "table.txt").read_text().startswith(format_table(table).splitlines()[0])
