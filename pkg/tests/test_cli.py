import csv
import json

import numpy as np
import pytest

from conftest import make_blobs
from kstarmeans.cli import main

TIMING_KEYS = {"runtime_s", "wall_time_s"}


def write_csv(path, points, labels=None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for i, row in enumerate(points):
            cells = [repr(float(v)) for v in row]
            if labels is not None:
                cells.append(int(labels[i]))
            writer.writerow(cells)


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def stable_payload(path):
    return json.dumps(strip_timing(json.loads(path.read_text())), sort_keys=True)


@pytest.fixture
def blob_csv(tmp_path):
    data, labels = make_blobs(np.random.default_rng(0), n=150, d=2, k=3, spread=15)
    path = tmp_path / "blobs.csv"
    write_csv(path, data.points, labels)
    return path


class TestClusterCommand:
    def test_finds_clusters_and_writes_artifacts(self, blob_csv, tmp_path, capsys):
        out = tmp_path / "run.json"
        code = main(["cluster", "--input", str(blob_csv), "--label-col", "2",
                     "--output", str(out), "--seed", "3"])
        assert code == 0
        record = json.loads(out.read_text())
        assert record["schema_version"] == 1
        assert record["command"] == "cluster"
        assert record["config"]["seed"] == 3
        assert record["result"]["k"] == 3
        assert len(record["result"]["assignments"]) == 150
        assert len(record["result"]["centroids"]) == 3
        cost = record["result"]["cost"]
        assert cost["total"] == pytest.approx(
            cost["model_cost"] + cost["index_cost"] + cost["residual_cost"])
        summary = json.loads(capsys.readouterr().out)
        assert summary["k"] == 3

        with open(tmp_path / "run.assignments.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["row", "cluster"]
        assert len(rows) == 151

    def test_single_point_csv(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("1.5,2.5\n")
        out = tmp_path / "one.json"
        assert main(["cluster", "--input", str(path), "--output", str(out)]) == 0
        record = json.loads(out.read_text())
        assert record["result"]["k"] == 1
        assert len(record["result"]["cost_trace"]) == 1

    def test_rerun_is_byte_identical_apart_from_timing(self, blob_csv, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        for out in (out1, out2):
            assert main(["cluster", "--input", str(blob_csv), "--label-col", "2",
                         "--output", str(out), "--seed", "11"]) == 0
        assert stable_payload(out1) != ""
        assert stable_payload(out1) == stable_payload(out2)
        a = (tmp_path / "a.assignments.csv").read_bytes()
        b = (tmp_path / "b.assignments.csv").read_bytes()
        assert a == b

    def test_strict_flag(self, blob_csv, tmp_path):
        out = tmp_path / "strict.json"
        assert main(["cluster", "--input", str(blob_csv), "--label-col", "2",
                     "--output", str(out), "--strict"]) == 0
        assert json.loads(out.read_text())["config"]["mode"] == "strict"

    def test_load_error_reports_json(self, tmp_path, capsys):
        path = tmp_path / "ragged.csv"
        path.write_text("0,0\n1\n")
        code = main(["cluster", "--input", str(path),
                     "--output", str(tmp_path / "x.json")])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "data"
        assert "row 2" in err["error"]["message"]

    def test_missing_file_reports_json(self, tmp_path, capsys):
        code = main(["cluster", "--input", str(tmp_path / "nope.csv"),
                     "--output", str(tmp_path / "x.json")])
        assert code == 1
        assert json.loads(capsys.readouterr().err)["error"]["type"] == "data"


class TestSynthCommand:
    def test_grid_shape(self, tmp_path):
        out = tmp_path / "grid"
        code = main(["synth", "--k-max", "5", "--seps", "2,3,4,5", "--reps", "2",
                     "--points", "60", "--output", str(out), "--seed", "4"])
        assert code == 0
        with open(out / "cells.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["true_k", "d_sep", "rep", "predicted_k", "exact", "runtime_s"]
        assert len(rows) - 1 == 5 * 4 * 2  # 40 cells
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["result"]["per_sep"]) == {"2.0", "3.0", "4.0", "5.0"}
        assert 0.0 <= summary["result"]["overall"]["accuracy"] <= 1.0

    def test_zero_reps_is_usage_error(self, tmp_path, capsys):
        code = main(["synth", "--k-max", "3", "--reps", "0",
                     "--output", str(tmp_path / "x")])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"]["type"] == "usage"

    def test_rerun_is_deterministic(self, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            assert main(["synth", "--k-max", "3", "--seps", "5", "--reps", "2",
                         "--points", "50", "--output", str(out), "--seed", "8"]) == 0
            outs.append(out)
        payloads = [stable_payload(out / "summary.json") for out in outs]
        assert payloads[0] == payloads[1]
        cells = []
        for out in outs:
            with open(out / "cells.csv") as fh:
                rows = [row[:-1] for row in csv.reader(fh)]  # drop runtime column
            cells.append(rows)
        assert cells[0] == cells[1]


class TestEvalCommand:
    def test_scores_easy_instance(self, blob_csv, tmp_path):
        out = tmp_path / "eval.json"
        code = main(["eval", "--input", str(blob_csv), "--label-col", "2",
                     "--output", str(out), "--seed", "5"])
        assert code == 0
        result = json.loads(out.read_text())["result"]
        assert result["true_k"] == 3
        assert result["predicted_k"] == 3
        assert result["acc"] >= 0.95
        assert 0.0 <= result["nmi"] <= 1.0
        assert -1.0 <= result["ari"] <= 1.0

    def test_label_col_required(self, blob_csv, tmp_path, capsys):
        code = main(["eval", "--input", str(blob_csv),
                     "--output", str(tmp_path / "x.json")])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"]["type"] == "usage"


class TestSweepCommand:
    def test_same_shape_as_cluster(self, blob_csv, tmp_path):
        out = tmp_path / "sweep.json"
        code = main(["sweep-bic", "--input", str(blob_csv), "--label-col", "2",
                     "--output", str(out), "--grid", "1,2,3,4,5", "--seed", "2"])
        assert code == 0
        record = json.loads(out.read_text())
        result = record["result"]
        assert result["candidate_ks"] == [1, 2, 3, 4, 5]
        assert len(result["bic_scores"]) == 5
        assert result["chosen_k"] in result["candidate_ks"]
        assert len(result["assignments"]) == 150
        assert (tmp_path / "sweep.assignments.csv").exists()

    def test_default_grid_on_tiny_input(self, tmp_path):
        path = tmp_path / "tiny.csv"
        write_csv(path, np.array([[0.0], [0.1], [5.0], [5.1]]))
        out = tmp_path / "tiny.json"
        assert main(["sweep-bic", "--input", str(path), "--output", str(out)]) == 0
        result = json.loads(out.read_text())["result"]
        assert result["candidate_ks"] == [1, 2, 3, 4]
        assert result["bic_scores"][-1] is None  # k = n cannot be scored


class TestBenchCommand:
    def test_timing_rows(self, blob_csv, tmp_path):
        out = tmp_path / "bench.csv"
        code = main(["bench", "--input", str(blob_csv), "--label-col", "2",
                     "--sizes", "50,100", "--reps", "2", "--output", str(out)])
        assert code == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["algorithm", "size", "rep", "seconds"]
        assert len(rows) - 1 == 2 * 2 * 2  # sizes x reps x {kstar, lloyd}
        assert {row[0] for row in rows[1:]} == {"kstar", "lloyd"}

    def test_size_above_n_is_usage_error(self, blob_csv, tmp_path, capsys):
        code = main(["bench", "--input", str(blob_csv), "--label-col", "2",
                     "--sizes", "500", "--output", str(tmp_path / "x.csv")])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"]["type"] == "usage"

    def test_lloyd_without_labels_is_usage_error(self, tmp_path, capsys):
        path = tmp_path / "plain.csv"
        write_csv(path, np.random.default_rng(0).normal(size=(30, 2)))
        code = main(["bench", "--input", str(path), "--sizes", "10",
                     "--algorithms", "kstar,lloyd",
                     "--output", str(tmp_path / "x.csv")])
        assert code == 2
