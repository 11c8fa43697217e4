# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""End-to-end tests for the command-line interface."""

from __future__ import annotations

import json

import pandas as pd
import pytest
from meal_glucose_model import estimation
from meal_glucose_model.analysis import ASSIGNMENT_COLUMNS, assign_groups
from meal_glucose_model.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    build_parser,
    run_cli,
)
from meal_glucose_model.exceptions import EstimationError
from meal_glucose_model.files import atomic_write_json
from meal_glucose_model.integrator import TRAJECTORY_COLUMNS
from meal_glucose_model.models import EstimationResult, ParameterBounds
from meal_glucose_model.settings import parameter_schema

SUBJECT_CSV = (
    "t_min,glucose_mg_dl\n"
    "0,92\n15,130\n30,160\n45,150\n60,135\n75,120\n90,110\n105,100\n120,95\n"
)


def _result(subject_id: str, kabs: float) -> EstimationResult:
    return EstimationResult(
        subject_id=subject_id,
        theta=ParameterBounds().initial_parameters().model_copy(update={"Kabs": kabs}),
        loss=1.0,
        evals=10,
        converged=True,
        reason="param_stalled",
        min_EGP=0.5,
        Gb=90.0,
    )


@pytest.fixture
def results_file(tmp_path):
    path = tmp_path / "results.json"
    atomic_write_json(path, [_result("A", 0.25), _result("B", 0.12), _result("C", 0.06)])
    return path


class TestSimulate:
    def test_default_grid(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert run_cli(["simulate", "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out)
        assert tuple(frame.columns) == TRAJECTORY_COLUMNS
        assert len(frame) == 2401
        assert frame["G"].iloc[0] == pytest.approx(90.0)

    def test_halved_step(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert run_cli(["simulate", "--dt", "0.025", "--out", str(out)]) == EXIT_OK
        assert len(pd.read_csv(out)) == 4801

    def test_no_dose_stays_basal(self, tmp_path):
        out = tmp_path / "traj.csv"
        argv = ["simulate", "--dose", "0", "--gb", "95", "--basal-consistency", "--out", str(out)]
        assert run_cli(argv) == EXIT_OK
        glucose = pd.read_csv(out)["G"]
        assert (glucose - 95.0).abs().max() <= 1e-6

    def test_manifest_is_written(self, tmp_path):
        out = tmp_path / "traj.csv"
        run_cli(["simulate", "--seed", "7", "--out", str(out)])
        manifest = json.loads((tmp_path / "traj.manifest.json").read_text(encoding="utf-8"))
        assert manifest["command"] == "simulate"
        assert manifest["seed"] == 7
        assert manifest["outputs"] == [str(out), str(tmp_path / "traj.params.schema.json")]
        assert manifest["config"]["Gb"] == 90.0

    def test_parameter_schema_is_written(self, tmp_path):
        out = tmp_path / "traj.csv"
        run_cli(["simulate", "--out", str(out)])
        schema = json.loads((tmp_path / "traj.params.schema.json").read_text(encoding="utf-8"))
        assert schema == parameter_schema()

    def test_invalid_parameter_file(self, tmp_path, write_csv, capsys):
        params = write_csv("params.json", json.dumps({"estimated": {"b": 2.0}}))
        code = run_cli(["simulate", "--params", str(params), "--out", str(tmp_path / "t.csv")])
        assert code == EXIT_VALIDATION
        assert "❌" in capsys.readouterr().err
        assert not (tmp_path / "t.csv").exists()

    def test_replay_reproduces_the_output(self, tmp_path):
        out = tmp_path / "traj.csv"
        run_cli(["simulate", "--dose", "75000", "--out", str(out)])
        first = out.read_bytes()
        out.unlink()
        assert run_cli(["replay", str(tmp_path / "traj.manifest.json")]) == EXIT_OK
        assert out.read_bytes() == first


class TestFit:
    def test_malformed_subject(self, tmp_path, write_csv):
        subject = write_csv("bad.csv", "t_min,glucose_mg_dl\n15,130\n30,160\n")
        code = run_cli(["fit", str(subject), "--out", str(tmp_path / "fit.json")])
        assert code == EXIT_VALIDATION

    def test_single_subject(self, tmp_path, write_csv):
        subject = write_csv("s01.csv", SUBJECT_CSV)
        out = tmp_path / "fit.json"
        assert run_cli(["fit", str(subject), "--max-evals", "5", "--out", str(out)]) == EXIT_OK
        (result,) = json.loads(out.read_text(encoding="utf-8"))
        assert result["subject_id"] == "s01"
        assert result["evals"] <= 5
        assert not (tmp_path / "fit.errors.json").exists()

    def test_directory_with_a_broken_file(self, tmp_path):
        data = tmp_path / "data"
        data.mkdir()
        for index in range(3):
            (data / f"s{index}.csv").write_text(SUBJECT_CSV, encoding="utf-8")
        (data / "broken.csv").write_text("t_min,glucose_mg_dl\n0,90\n", encoding="utf-8")
        out = tmp_path / "fit.json"

        code = run_cli(["fit", "--dir", str(data), "--max-evals", "5", "--out", str(out)])

        assert code == EXIT_VALIDATION
        assert len(json.loads(out.read_text(encoding="utf-8"))) == 3
        errors = json.loads((tmp_path / "fit.errors.json").read_text(encoding="utf-8"))
        assert [issue["code"] for issue in errors["corpus_issues"]] == ["too_few_samples"]
        schema = json.loads((tmp_path / "fit.schema.json").read_text(encoding="utf-8"))
        assert schema["type"] == "array"

    def test_numerical_failure_exits_with_two(self, tmp_path, write_csv, monkeypatch, capsys):
        def diverging_fit(subject, fixed, config):
            raise EstimationError(subject.id, "integration diverged at t=12 min")

        monkeypatch.setattr(estimation, "fit", diverging_fit)
        subject = write_csv("s01.csv", SUBJECT_CSV)
        out = tmp_path / "fit.json"

        assert run_cli(["fit", str(subject), "--out", str(out)]) == EXIT_NUMERICAL

        assert json.loads(out.read_text(encoding="utf-8")) == []
        errors = json.loads((tmp_path / "fit.errors.json").read_text(encoding="utf-8"))
        (failure,) = errors["fit_failures"]
        assert failure["subject_id"] == "s01"
        assert failure["kind"] == "numerical"
        assert "❌ s01" in capsys.readouterr().out

    def test_subject_and_dir_are_exclusive(self, tmp_path):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["fit", "a.csv", "--dir", "d", "--out", "o.json"])


class TestAnalysisCommands:
    def test_classify(self, tmp_path, results_file):
        out = tmp_path / "groups.json"
        assert run_cli(["classify", str(results_file), "--out", str(out)]) == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert set(document) >= {"tol_G", "kabs_threshold", "assignments", "summary"}
        assert len(document["assignments"]) == 3
        header = (tmp_path / "groups.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == ",".join(ASSIGNMENT_COLUMNS)

    def test_empty_results_file(self, tmp_path, write_csv):
        results = write_csv("results.json", "[]")
        code = run_cli(["classify", str(results), "--out", str(tmp_path / "g.json")])
        assert code == EXIT_VALIDATION

    @pytest.fixture
    def groups_file(self, tmp_path, engineered_corpus):
        path = tmp_path / "groups.json"
        atomic_write_json(path, {"assignments": assign_groups(*engineered_corpus)})
        return path

    def test_stats_across_groups(self, tmp_path, groups_file):
        out = tmp_path / "stats.json"
        argv = ["stats", str(groups_file), "--metric", "kabs", "--out", str(out)]
        assert run_cli(argv) == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert [row["n"] for row in document["stats"]] == [19, 8, 5]
        assert len(document["significance"]["pairwise"]) == 3
        assert document["significance"]["p"] < 1e-4

    def test_stats_split_by_peak_value(self, tmp_path, groups_file):
        out = tmp_path / "stats.json"
        argv = ["stats", str(groups_file), "--metric", "b", "--split-peak-value", "--out", str(out)]
        assert run_cli(argv) == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert len(document["stats"]) == 2
        assert document["significance"]["F"] == 0.0

    def test_stats_needs_assignments(self, tmp_path, write_csv):
        groups = write_csv("groups.json", json.dumps({"summary": []}))
        code = run_cli(["stats", str(groups), "--out", str(tmp_path / "s.json")])
        assert code == EXIT_VALIDATION

    def test_envelope(self, tmp_path, results_file):
        out = tmp_path / "envelope.csv"
        argv = ["envelope", str(results_file), "--names", "G", "Ra", "--out", str(out)]
        assert run_cli(argv) == EXIT_OK
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["t_min", "G_mean", "G_sd", "Ra_mean", "Ra_sd"]
        assert len(frame) == 2401

    def test_summary(self, tmp_path, results_file):
        out = tmp_path / "summary.json"
        assert run_cli(["summary", str(results_file), "--out", str(out)]) == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["n"] == 3
        assert document["parameters"]["Kabs"]["mean"] == pytest.approx(0.43 / 3)
        assert document["loss"]["sd"] == 0.0
