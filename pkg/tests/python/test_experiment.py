"""
Tests for the experiment harness.
"""

import csv

import pytest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src/python'))

from pqlstools.classical import solve_exact, solve_tabu
from pqlstools.config import ExperimentConfig, load_config
from pqlstools.experiment import (
    RECORD_FIELDS,
    MetricUndefinedError,
    approximation_ratio,
    instance_seed,
    paired_comparison,
    run_point,
    run_seed,
    run_sweep,
    summarize,
    summary_path_for,
)
from pqlstools.ising import generate_instance
from pqlstools.subsolver import baseline_spec
from pqlstools.utils import derive_seed
from pqlstools.validator import validate_results_file

CONFIG_DIR = os.path.join(os.path.dirname(__file__), '../../configs')


def tiny_config(**overrides):
    data = {
        "experiment_id": "tiny",
        "n_p": 10,
        "n_g": 4,
        "branches": 1,
        "unit_length": 3,
        "generations": 1,
        "instances_per_point": 1,
        "master_seed": 7,
        "baseline_restarts": 2,
        "baseline_budget": 100,
        "workers": 1,
    }
    data.update(overrides)
    return ExperimentConfig.from_mapping(data)


def without_wall_time(records):
    return [r.to_row()[:-2] + r.to_row()[-1:] for r in records]


class TestApproximationRatio:
    """Test the approximation ratio metric."""

    def test_ratio(self):
        """Test the basic ratio."""
        assert approximation_ratio(-90, -100) == 0.9

    def test_identity(self):
        """Test matching the baseline."""
        assert approximation_ratio(-100, -100) == 1.0

    def test_beating_baseline(self):
        """Test a better energy gives a ratio above one."""
        assert approximation_ratio(-110, -100) > 1.0

    @pytest.mark.parametrize("baseline", [0.0, 5.0])
    def test_undefined(self, baseline):
        """Test non-negative baselines are refused."""
        with pytest.raises(MetricUndefinedError):
            approximation_ratio(-5, baseline)


class TestRunPoint:
    """Test runs of a single sweep point."""

    def test_one_record_per_method(self):
        """Test a QLS-mode point yields one record per method."""
        config = tiny_config()
        records = run_point(config, config.points()[0])
        assert [r.method for r in records] == ["pqls", "qls"]
        assert all(not r.error for r in records)
        assert all(r.subsolver_calls == 3 for r in records)

    def test_degenerate_pqls_equals_qls(self):
        """Test B = 1, N_G = 1 PQLS matches QLS on the same seed."""
        config = tiny_config()
        pqls, qls = run_point(config, config.points()[0])
        assert pqls.best_energy == qls.best_energy
        assert pqls.run_seed == qls.run_seed

    def test_record_invariants(self):
        """Test the ratio and seeds recorded."""
        config = tiny_config(instances_per_point=2)
        records = run_point(config, config.points()[0])
        assert len(records) == 4
        for record in records:
            assert record.baseline_energy < 0
            assert record.approx_ratio == record.best_energy / record.baseline_energy
            assert record.instance_seed == instance_seed(7, 10, record.instance)
            assert record.master_seed == 7
            assert record.run_seed == run_seed(7, 1, record.instance)
            assert record.wall_ms >= 0

    def test_baseline_recomputed(self):
        """Test the recorded baseline is the seeded tabu run."""
        config = tiny_config()
        record = run_point(config, config.points()[0])[0]
        problem = generate_instance(10, record.instance_seed)
        expected = solve_tabu(problem, config.baseline_spec(), derive_seed(record.instance_seed, 0, 0))
        assert record.baseline_energy == expected.energy

    def test_equal_work_qls(self):
        """Test qls_work runs B times the iterations."""
        config = tiny_config(branches=4, generations=2, methods=["pqls", "qls", "qls_work"])
        pqls, qls, qls_work = run_point(config, config.points()[0])
        assert pqls.subsolver_calls == 4 * 3 * 2
        assert qls.subsolver_calls == 3 * 2
        assert qls_work.subsolver_calls == 4 * 3 * 2

    def test_deterministic(self):
        """Test equal configs give equal rows apart from wall time."""
        config = tiny_config(branches=2, instances_per_point=2, subsolver="annealing")
        point = config.points()[0]
        assert without_wall_time(run_point(config, point)) == without_wall_time(run_point(config, point))

    def test_errors_become_rows(self):
        """Test a failing subsolver is recorded rather than raised."""
        config = tiny_config(n_p=18, n_g=17, subsolver="vqe", vqe_iterations=1)
        records = run_point(config, config.points()[0])
        assert len(records) == 2
        assert all("16" in r.error for r in records)
        assert all(r.approx_ratio is None for r in records)
        assert all(r.baseline_energy is not None for r in records)

    @pytest.mark.slow
    def test_baseline_matches_exact(self):
        """Test the 20-spin baseline finds the exact ground energy on most instances."""
        hits = 0
        for k in range(1, 21):
            seed = instance_seed(0, 20, k)
            problem = generate_instance(20, seed)
            baseline = solve_tabu(problem, baseline_spec(), derive_seed(seed, 0, 0)).energy
            hits += baseline == pytest.approx(solve_exact(problem).energy, abs=1e-9)
        assert hits >= 18


class TestSummaries:
    """Test sweep summaries."""

    def test_paired_comparison(self):
        """Test wins, ties, losses and the sign test."""
        wins, ties, losses, p_value = paired_comparison(
            [-5.0, -5.0, -4.0, -6.0, -7.0, -3.0, -9.0],
            [-4.0, -5.0, -3.0, -5.0, -6.0, -2.0, -8.0],
        )
        assert (wins, ties, losses) == (6, 1, 0)
        assert p_value == pytest.approx(2 * 0.5 ** 6)

    def test_all_ties(self):
        """Test the sign test with no untied pairs."""
        assert paired_comparison([-1.0, -2.0], [-1.0, -2.0]) == (0, 2, 0, 1.0)

    def test_summarize(self):
        """Test per-point statistics and the paired columns."""
        config = tiny_config(instances_per_point=3)
        records = run_point(config, config.points()[0])
        summaries = summarize(records)
        assert [s.method for s in summaries] == ["pqls", "qls"]
        for summary in summaries:
            assert summary.runs == 3
            assert summary.errors == 0
            assert summary.pqls_wins + summary.ties + summary.pqls_losses == 3
        ratios = sorted(r.approx_ratio for r in records if r.method == "pqls")
        assert summaries[0].median_ratio == ratios[1]

    def test_summary_path(self):
        """Test the sibling file name."""
        assert summary_path_for("out/results.csv").name == "results.summary.csv"


class TestRunSweep:
    """Test whole sweeps."""

    def test_sweep_writes_valid_csv(self, tmp_path):
        """Test coverage, header and validation of the emitted file."""
        config = tiny_config(branches=[1, 2], n_g=[3, 4], instances_per_point=2)
        out = tmp_path / "results.csv"
        report = run_sweep(config, output=out)

        assert report.error_count == 0
        assert len(report.records) == 4 * 2 * 2
        with open(out, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == RECORD_FIELDS
        assert len(rows) == 1 + 16
        assert validate_results_file(out) == []
        assert report.summary_path.exists()
        assert b"\r\n" not in out.read_bytes()

    def test_row_order(self, tmp_path):
        """Test rows follow point, instance, method order."""
        config = tiny_config(branches=[1, 2], instances_per_point=2)
        report = run_sweep(config, output=tmp_path / "r.csv")
        keys = [(r.branches, r.instance, r.method) for r in report.records]
        assert keys == [
            (1, 1, "pqls"), (1, 1, "qls"), (1, 2, "pqls"), (1, 2, "qls"),
            (2, 1, "pqls"), (2, 1, "qls"), (2, 2, "pqls"), (2, 2, "qls"),
        ]

    def test_instances_shared_across_points(self, tmp_path):
        """Test points with the same n_p reuse instances."""
        config = tiny_config(branches=[1, 2])
        report = run_sweep(config, output=tmp_path / "r.csv")
        assert len({r.instance_seed for r in report.records}) == 1

    def test_pooled_sweep_matches_serial(self, tmp_path):
        """Test worker processes do not change the rows."""
        config = tiny_config(branches=[1, 2], instances_per_point=2, subsolver="annealing")
        serial = run_sweep(config, output=tmp_path / "serial.csv", workers=1)
        pooled = run_sweep(config, output=tmp_path / "pooled.csv", workers=3)
        assert without_wall_time(serial.records) == without_wall_time(pooled.records)

    def test_error_rows_counted(self, tmp_path):
        """Test errored rows are written and counted."""
        config = tiny_config(n_p=18, n_g=17, subsolver="vqe", vqe_iterations=1)
        report = run_sweep(config, output=tmp_path / "r.csv")
        assert report.error_count == 2
        assert validate_results_file(tmp_path / "r.csv") == []

    @pytest.mark.slow
    @pytest.mark.integration
    def test_branches_sweep_end_to_end(self, tmp_path):
        """Test the bundled branch-count sweep produces a valid CSV."""
        config = load_config(os.path.join(CONFIG_DIR, "fig2b_branches.toml"))
        report = run_sweep(config, output=tmp_path / "branches.csv")
        assert report.error_count == 0
        assert len(report.records) == 6 * 5 * 2
        assert validate_results_file(tmp_path / "branches.csv") == []
