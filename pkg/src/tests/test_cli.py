"""
Tests for the command-line entry point: exit codes, payload formats, and the
history and metrics files a run leaves behind.
"""

import json
import os
import sys

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from src.verifier.cli import CSV_HEADER_COMMENT, EXIT_FAILED, EXIT_OK, EXIT_USAGE, REPORT_FIELDS, main
from src.verifier.config import DEFAULT_CONFIG

SMALL_GRID = ["--radial-samples", "4", "--theta-samples", "3"]


@pytest.fixture
def config_file(tmp_path):
    config = json.loads(json.dumps(DEFAULT_CONFIG))
    config["history"]["history_file"] = str(tmp_path / "history.json")
    config["performance"]["metrics_file"] = str(tmp_path / "metrics.json")
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def run(config_file, *argv):
    return main([argv[0], "--config", str(config_file), "--quiet", *argv[1:]])


class TestUsage:
    @pytest.mark.parametrize("argv", [
        ["check", "--delta", "0.3"],
        ["check", "--epsilon", "-1"],
        ["check", "--fd-step", "0"],
        ["check", "--schedule", "nope"],
        ["sample", "--k", "40"],
        ["frobnicate"],
    ])
    def test_bad_invocations_exit_2(self, config_file, argv):
        assert run(config_file, *argv) == EXIT_USAGE

    def test_delta_incompatible_with_epsilon(self, config_file):
        assert run(config_file, "build", "--epsilon", "0.1", "--delta", "0.2") == EXIT_USAGE

    def test_k_max_too_small(self, config_file):
        assert run(config_file, "build", "--k-max", "8") == EXIT_USAGE


class TestBuild:
    def test_default(self, config_file, capsys):
        assert run(config_file, "build") == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["parameters"]["k0"] == 8
        assert abs(payload["parameters"]["delta"] - 0.0906919) < 1e-6
        assert [a["k"] for a in payload["annuli"]] == [8, 9, 10, 11]

    def test_explicit_delta(self, config_file, capsys):
        assert run(config_file, "build", "--epsilon", "0.3", "--delta", "0.2") == EXIT_OK
        assert json.loads(capsys.readouterr().out)["parameters"]["k0"] == 6

    def test_out_file(self, config_file, tmp_path):
        out = tmp_path / "build.json"
        assert run(config_file, "build", "--out", str(out)) == EXIT_OK
        assert json.loads(out.read_text())["parameters"]["preset"] == "paper"


class TestSample:
    def test_potential_bound_csv(self, config_file, capsys):
        assert run(config_file, "sample", "--what", "potential-bound", "--k", "9", "--theta", "0.5", *SMALL_GRID) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == CSV_HEADER_COMMENT
        assert lines[1] == "t,theta,opnorm_times_r"
        assert len(lines) == 2 + 6 * 4
        values = [float(line.split(",")[2]) for line in lines[2:]]
        assert max(values) <= 0.6

    def test_residual_column(self, config_file, capsys):
        assert run(config_file, "sample", "--what", "residual", "--schedule", "mild", *SMALL_GRID) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[1] == "t,theta,residual"
        assert all(float(line.split(",")[2]) < 1e-6 for line in lines[2:])


class TestCheck:
    def test_paper_passes(self, config_file, tmp_path, capsys):
        assert run(config_file, "check", "--tol", "1e-5", *SMALL_GRID) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"parameters", "checks", "all_pass"}
        assert payload["all_pass"] is True
        assert all(set(c) == set(REPORT_FIELDS) for c in payload["checks"])
        assert all(isinstance(c["pass"], bool) and isinstance(c["points"], int) for c in payload["checks"]), payload["checks"]

        history = json.loads((tmp_path / "history.json").read_text())
        assert history["runs"][-1]["command"] == "check"
        assert history["runs"][-1]["all_pass"] is True
        assert all(c["pass"] is True for c in history["runs"][-1]["checks"])
        metrics = json.loads((tmp_path / "metrics.json").read_text())
        assert metrics["final_stats"]["total_checks"] == len(payload["checks"])

    def test_mild_fails_k0_conditions(self, config_file, tmp_path, capsys):
        assert run(config_file, "check", "--schedule", "mild", "--no-history", *SMALL_GRID) == EXIT_FAILED
        payload = json.loads(capsys.readouterr().out)
        first = payload["checks"][0]
        assert first["name"] == "k0_conditions" and first["pass"] is False
        assert not (tmp_path / "history.json").exists()

    def test_csv_format(self, config_file, capsys):
        code = run(config_file, "infinity", "--format", "csv", "--tol", "1e-5", "--no-history", *SMALL_GRID)
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(REPORT_FIELDS)
        assert [line.split(",")[0] for line in lines[1:]] == [
            "infinity_support", "infinity_potential_bound", "infinity_identity", "vanishing_infinity",
        ]


class TestKelvin:
    @pytest.mark.parametrize("dimension", ["2", "3"])
    def test_kelvin_check(self, config_file, capsys, dimension):
        assert run(config_file, "kelvin-check", "--dimension", dimension, "--no-history") == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["parameters"]["dimension"] == int(dimension)
        assert payload["all_pass"] is True
