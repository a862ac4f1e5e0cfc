from glob import glob
from os.path import exists, join

import pandas as pd
import pytest

from human_activity_recognition import __version__
from human_activity_recognition.CLI import main


def test_version(capsys):
    with pytest.raises(SystemExit) as exit:
        main(["--version"])

    assert exit.value.code == 0
    assert capsys.readouterr().out.strip() == f"HAR CLI {__version__}"


def test_no_command():
    assert main([]) == 1


def test_missing_config(tmp_path):
    assert main(["run", "-c", str(tmp_path / "absent.yaml")]) == 1


def test_unknown_model_override(write_experiment):
    assert main(["run", "-c", write_experiment(), "--models", "knn,xgboost"]) == 1


def test_synth_then_ingest(tmp_path, write_experiment):
    directory = tmp_path / "corpus"

    assert main(["synth", "-c", write_experiment(), "-o", str(directory), "--seed", "3"]) == 0

    manifests = glob(str(directory / "*.yaml"))
    assert [name.rsplit("/", 1)[1] for name in manifests] == ["synthetic-3x3-seed3.yaml"]
    assert exists(directory / "synthetic-3x3-seed3.csv")

    assert main(["ingest", manifests[0]]) == 0


def test_synth_with_the_default_corpus(tmp_path):
    directory = tmp_path / "default"

    assert main(["synth", "--out", str(directory)]) == 0
    assert exists(directory / "synthetic-6x3-seed7.yaml")
    assert exists(directory / "synthetic-6x3-seed7.csv")

    assert main(["synth", "--out", str(directory), "--channels", "6", "--seed", "1"]) == 0
    assert exists(directory / "synthetic-6x6-seed1.yaml")


def test_preprocess(write_experiment):
    assert main(["preprocess", "-c", write_experiment(), "--split", "by-user"]) == 0


def test_run_then_table(tmp_path, write_experiment):
    filename = write_experiment(models=["knn", "gaussian_nb"])

    assert main(["run", "-c", filename, "--seed", "0,1"]) == 0

    schedule_directory = tmp_path / "output" / "tiny" / "ce_only"
    written = pd.read_csv(schedule_directory / "results_table.csv", index_col=0)
    assert written.index.tolist() == ["KNN", "GaussianNB"]
    assert exists(schedule_directory / "results_table.txt")
    assert exists(schedule_directory / "seed_1" / "report.json")

    assert main(["table", str(tmp_path / "output"), "-o", str(tmp_path / "table")]) == 0
    merged = pd.read_csv(tmp_path / "table" / "results_table.csv", index_col=0)
    assert merged.columns.tolist() == written.columns.tolist()


def test_table_without_reports(tmp_path):
    assert main(["table", str(tmp_path)]) == 1


def test_evaluate_before_training_exits_2(write_experiment):
    assert main(["evaluate", "-c", write_experiment(models=["knn"])]) == 2


def test_features_dump(tmp_path, write_experiment):
    filename = write_experiment()

    assert main(["features", "dump", "-c", filename, "--class", "class_1", "--limit", "2"]) == 0
    assert len(glob(str(tmp_path / "output" / "tiny" / "features" / "segment_*_spectral.csv"))) == 2

    assert main(["features", "dump", "-c", filename, "--segment", "100000"]) == 1
