"""
Tests for the command-line interface.
"""

import json
import logging

import pytest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src/python'))

from pqlstools.cli import format_output, run
from pqlstools.instance import load_instance, save_instance
from pqlstools.ising import IsingProblem, generate_instance

SWEEP_TOML = """
experiment_id = "cli"
n_p = 10
n_g = 4
branches = [1, 2]
unit_length = 2
generations = 1
instances_per_point = 1
baseline_restarts = 2
baseline_budget = 50
workers = 1
"""


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "instance.txt"
    save_instance(generate_instance(10, 3), path)
    return path


class TestFormatOutput:
    """Test output formatting."""

    def test_text(self):
        """Test key-value text with lists."""
        text = format_output({"a": 1, "b": [2, 3]})
        assert text == "a: 1\nb:\n  - 2\n  - 3"

    def test_json(self):
        """Test JSON output."""
        assert json.loads(format_output({"a": 1}, "json")) == {"a": 1}


class TestGen:
    """Test the gen command."""

    def test_writes_file(self, tmp_path, capsys):
        """Test generating an instance file."""
        out = tmp_path / "gen.txt"
        assert run(["gen", "--n", "6", "--seed", "9", "--out", str(out)]) == 0
        assert load_instance(out) == generate_instance(6, 9)

    def test_stdout(self, capsys):
        """Test printing an instance."""
        assert run(["gen", "--n", "3"]) == 0
        assert capsys.readouterr().out.startswith("ising 3\n")

    def test_invalid_size(self, capsys):
        """Test a rejected size exits 1."""
        assert run(["gen", "--n", "0"]) == 1
        assert capsys.readouterr().err.startswith("Error: ")


class TestSolve:
    """Test the solve command."""

    def test_json_summary(self, instance_file, capsys):
        """Test the JSON summary fields."""
        code = run(["solve", str(instance_file), "--sub-size", "4", "--branches", "2",
                    "--unit-length", "3", "--generations", "2", "--json"])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["n"] == 10
        assert summary["subsolver_calls"] == 12
        assert len(summary["per_generation"]) == 2
        assert summary["best_energy"] == summary["per_generation"][-1]
        assert len(summary["best_config"]) == 10

    def test_text_summary(self, instance_file, capsys):
        """Test the plain summary."""
        assert run(["solve", str(instance_file), "--unit-length", "2"]) == 0
        assert "best_energy: " in capsys.readouterr().out

    def test_sub_size_too_large(self, instance_file, capsys):
        """Test an invalid sub-problem size."""
        assert run(["solve", str(instance_file), "--sub-size", "11"]) == 1

    def test_missing_instance(self, tmp_path, capsys):
        """Test a missing file exits 1."""
        assert run(["solve", str(tmp_path / "absent.txt")]) == 1

    def test_malformed_instance(self, tmp_path, capsys):
        """Test a malformed file reports the line."""
        path = tmp_path / "bad.txt"
        path.write_text("ising 2\nJ 2 1 1.0\n", encoding="utf-8")
        assert run(["solve", str(path)]) == 1
        assert "line 2" in capsys.readouterr().err


class TestBaseline:
    """Test the baseline command."""

    def test_energy_file(self, tmp_path, capsys):
        """Test writing the baseline energy."""
        path = tmp_path / "two.txt"
        save_instance(IsingProblem(2, {(1, 2): 1.0}), path)
        out = tmp_path / "energy.txt"
        assert run(["baseline", str(path), "--restarts", "2", "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == "-1\n"
        assert capsys.readouterr().out.strip() == "-1"


class TestSweep:
    """Test the sweep command."""

    def test_sweep_and_validate(self, tmp_path, capsys):
        """Test a tiny sweep writes a CSV that validates."""
        config = tmp_path / "sweep.toml"
        config.write_text(SWEEP_TOML, encoding="utf-8")
        out = tmp_path / "results.csv"
        assert run(["sweep", "--config", str(config), "--out", str(out), "-q"]) == 0
        assert out.exists()
        assert (tmp_path / "results.summary.csv").exists()
        assert run(["validate", "--csv", str(out)]) == 0
        assert "is valid" in capsys.readouterr().out

    def test_partial_failure_exit_code(self, tmp_path, capsys):
        """Test errored rows give exit status 2."""
        config = tmp_path / "sweep.toml"
        config.write_text(SWEEP_TOML.replace("n_p = 10\nn_g = 4", "n_p = 18\nn_g = 17")
                          + 'subsolver = "vqe"\nvqe_iterations = 1\n', encoding="utf-8")
        assert run(["sweep", "--config", str(config), "--out", str(tmp_path / "r.csv"), "-q"]) == 2

    def test_invalid_config(self, tmp_path, capsys):
        """Test a config validation error exits 1."""
        config = tmp_path / "sweep.toml"
        config.write_text("branches = []\n", encoding="utf-8")
        assert run(["sweep", "--config", str(config)]) == 1
        assert "invalid configuration" in capsys.readouterr().err


class TestValidate:
    """Test the validate command."""

    def test_invalid_csv(self, tmp_path, capsys):
        """Test a broken results file exits 1."""
        path = tmp_path / "r.csv"
        path.write_text("experiment_id\n", encoding="utf-8")
        assert run(["validate", "--csv", str(path)]) == 1
        assert "line 1" in capsys.readouterr().out

    def test_instances(self, tmp_path, instance_file, capsys):
        """Test validating instance files."""
        bad = tmp_path / "bad.txt"
        bad.write_text("ising 2\nh 3 1.0\n", encoding="utf-8")
        assert run(["validate", "--instance", str(instance_file)]) == 0
        assert run(["validate", "-q", "--instance", str(instance_file), "--instance", str(bad)]) == 1

    def test_nothing_to_validate(self, capsys):
        """Test the command needs a target."""
        assert run(["validate"]) == 1
