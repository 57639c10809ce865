"""
Experiment harness: paired PQLS/QLS runs against a tabu baseline, sweeps and summaries.
"""

import csv
import dataclasses
import logging
import statistics
import time
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from scipy.stats import binomtest

from .classical import solve_tabu
from .config import ExperimentConfig, ExperimentPoint
from .engine import PqlsParams, run_pqls, run_qls
from .ising import IsingProblem, generate_instance
from .subsolver import SubsolverSpec
from .utils import as_seed, derive_seed, format_float, resolve_workers

logger = logging.getLogger(__name__)

# Salts separating the instance and run seed streams of one master seed.
INSTANCE_SALT = 0x5EED1A57
RUN_SALT = 0x0B5E55ED


def _format_row(record: object) -> List[str]:
    row = []
    for value in dataclasses.astuple(record):
        if value is None:
            row.append("")
        elif isinstance(value, float):
            row.append(format_float(value))
        else:
            row.append(str(value))
    return row


class MetricUndefinedError(ValueError):
    """The approximation ratio is undefined for a non-negative baseline energy."""


def approximation_ratio(e: float, e_baseline: float) -> float:
    """
    Ratio of a method's energy to the baseline energy.

    Values above 1 mean the method beat the baseline.

    Raises:
        MetricUndefinedError: If e_baseline >= 0
    """
    if not e_baseline < 0:
        raise MetricUndefinedError(
            f"Approximation ratio needs a negative baseline energy, got {e_baseline}"
        )
    return e / e_baseline


@dataclass
class RunRecord:
    """
    One CSV row: a method run on one instance of one sweep point.

    ``master_seed`` is the sweep's configured seed; ``run_seed`` is the seed
    derived from it for this point and instance, which reproduces the run alone.
    """
    experiment_id: str
    method: str
    n_p: int
    n_g: int
    branches: int
    unit_length: int
    generations: int
    subsolver: str
    vqe_iterations: int
    instance: int
    instance_seed: int
    master_seed: int
    run_seed: int
    best_energy: Optional[float] = None
    baseline_energy: Optional[float] = None
    approx_ratio: Optional[float] = None
    subsolver_calls: Optional[int] = None
    wall_ms: Optional[int] = None
    error: str = ""

    def to_row(self) -> List[str]:
        return _format_row(self)


RECORD_FIELDS = tuple(f.name for f in dataclasses.fields(RunRecord))


@dataclass
class PointSummary:
    """Aggregate of one (point, method) group, with the paired PQLS/QLS comparison of its point."""
    experiment_id: str
    method: str
    n_p: int
    n_g: int
    branches: int
    unit_length: int
    generations: int
    subsolver: str
    vqe_iterations: int
    runs: int
    errors: int
    mean_ratio: Optional[float]
    median_ratio: Optional[float]
    pqls_wins: Optional[int] = None
    ties: Optional[int] = None
    pqls_losses: Optional[int] = None
    sign_test_p: Optional[float] = None

    def to_row(self) -> List[str]:
        return _format_row(self)


SUMMARY_FIELDS = tuple(f.name for f in dataclasses.fields(PointSummary))


@dataclass
class SweepReport:
    """Where a sweep wrote its results and what it found."""
    records: List[RunRecord]
    summaries: List[PointSummary]
    csv_path: Path
    summary_path: Path

    @property
    def error_count(self) -> int:
        return sum(1 for r in self.records if r.error)


def instance_seed(master_seed: int, n_p: int, k: int) -> int:
    """Seed of instance k at size n_p; points sharing n_p share instances."""
    return derive_seed(master_seed ^ INSTANCE_SALT, n_p, k)


def run_seed(master_seed: int, point_index: int, k: int) -> int:
    return derive_seed(master_seed ^ RUN_SALT, point_index, k)


@lru_cache(maxsize=64)
def _baseline_energy(problem: IsingProblem, spec: SubsolverSpec, seed: int) -> float:
    return solve_tabu(problem, spec, seed).energy


def _run_method(
    method: str,
    problem: IsingProblem,
    config: ExperimentConfig,
    point: ExperimentPoint,
    spec: SubsolverSpec,
    seed: int,
) -> Tuple[float, int]:
    if method == "pqls":
        params = PqlsParams(
            sub_size=point.n_g,
            branches=point.branches,
            unit_length=point.unit_length,
            generations=point.generations,
            subsolver=spec,
            master_seed=seed,
            accept_rule=config.accept_rule,
        )
        result = run_pqls(problem, None, params)
        return result.best_energy, result.subsolver_calls

    iterations = point.unit_length * point.generations
    if method == "qls_work":
        iterations *= point.branches
    branch = run_qls(problem, None, iterations, point.n_g, spec, seed, config.accept_rule)
    return branch.best_energy, iterations


def run_instance(config: ExperimentConfig, point: ExperimentPoint, k: int) -> List[RunRecord]:
    """
    Run every configured method on instance k of a point.

    PQLS and both QLS variants share the run seed, so they start from the
    same random configuration. Failures become rows with the error column set.
    """
    seed_i = instance_seed(config.master_seed, point.n_p, k)
    seed_r = run_seed(config.master_seed, point.index, k)
    spec = config.subsolver_spec(point.vqe_iterations)

    def record(method: str) -> RunRecord:
        return RunRecord(
            experiment_id=config.experiment_id,
            method=method,
            n_p=point.n_p,
            n_g=point.n_g,
            branches=point.branches,
            unit_length=point.unit_length,
            generations=point.generations,
            subsolver=config.subsolver,
            vqe_iterations=point.vqe_iterations,
            instance=k,
            instance_seed=seed_i,
            master_seed=as_seed(config.master_seed),
            run_seed=seed_r,
        )

    try:
        problem = generate_instance(point.n_p, seed_i)
        baseline = _baseline_energy(problem, config.baseline_spec(), derive_seed(seed_i, 0, 0))
    except Exception as e:
        logger.warning("point %d instance %d: baseline failed: %s", point.index, k, e)
        return [dataclasses.replace(record(m), error=f"baseline: {e}") for m in config.methods]

    records = []
    for method in config.methods:
        row = record(method)
        row.baseline_energy = baseline
        start = time.perf_counter()
        try:
            row.best_energy, row.subsolver_calls = _run_method(
                method, problem, config, point, spec, seed_r
            )
            row.approx_ratio = approximation_ratio(row.best_energy, baseline)
        except Exception as e:
            row.error = str(e)
            logger.warning("point %d instance %d %s: %s", point.index, k, method, e)
        row.wall_ms = int(round((time.perf_counter() - start) * 1000))
        records.append(row)

    logger.info("point %d instance %d done", point.index, k)
    return records


def run_point(config: ExperimentConfig, point: ExperimentPoint) -> List[RunRecord]:
    """Records for instances 1..instances_per_point, in instance then method order."""
    records = []
    for k in range(1, config.instances_per_point + 1):
        records.extend(run_instance(config, point, k))
    return records


def _instance_task(args: Tuple[ExperimentConfig, ExperimentPoint, int]) -> List[RunRecord]:
    return run_instance(*args)


def _iter_results(config: ExperimentConfig, workers: int) -> Iterator[List[RunRecord]]:
    tasks = [
        (config, point, k)
        for point in config.points()
        for k in range(1, config.instances_per_point + 1)
    ]
    if workers <= 1 or len(tasks) <= 1:
        yield from map(_instance_task, tasks)
        return
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as executor:
        yield from executor.map(_instance_task, tasks)


def summary_path_for(csv_path: Union[str, Path]) -> Path:
    """results.csv -> results.summary.csv"""
    path = Path(csv_path)
    return path.with_name(f"{path.stem}.summary{path.suffix or '.csv'}")


def _point_key(record: RunRecord) -> Tuple:
    return (
        record.n_p, record.n_g, record.branches, record.unit_length,
        record.generations, record.vqe_iterations,
    )


def paired_comparison(
    pqls_energies: Sequence[float], qls_energies: Sequence[float]
) -> Tuple[int, int, int, float]:
    """
    Wins, ties and losses of PQLS against QLS over paired instances, with the
    two-sided exact sign-test p-value (ties dropped; 1.0 when every pair ties).
    """
    wins = sum(1 for p, q in zip(pqls_energies, qls_energies) if p < q)
    losses = sum(1 for p, q in zip(pqls_energies, qls_energies) if p > q)
    ties = len(pqls_energies) - wins - losses
    if wins + losses == 0:
        return wins, ties, losses, 1.0
    return wins, ties, losses, float(binomtest(wins, wins + losses, 0.5).pvalue)


def summarize(records: Sequence[RunRecord]) -> List[PointSummary]:
    """Group records by point and method in first-seen order."""
    groups: "OrderedDict[Tuple, List[RunRecord]]" = OrderedDict()
    for record in records:
        groups.setdefault(_point_key(record) + (record.method,), []).append(record)

    summaries = []
    for key, group in groups.items():
        first = group[0]
        ratios = [r.approx_ratio for r in group if not r.error and r.approx_ratio is not None]
        summary = PointSummary(
            experiment_id=first.experiment_id,
            method=first.method,
            n_p=first.n_p,
            n_g=first.n_g,
            branches=first.branches,
            unit_length=first.unit_length,
            generations=first.generations,
            subsolver=first.subsolver,
            vqe_iterations=first.vqe_iterations,
            runs=len(group),
            errors=sum(1 for r in group if r.error),
            mean_ratio=statistics.mean(ratios) if ratios else None,
            median_ratio=statistics.median(ratios) if ratios else None,
        )

        point = key[:-1]
        pqls = groups.get(point + ("pqls",))
        qls = groups.get(point + ("qls",))
        if pqls and qls:
            by_instance: Dict[int, float] = {
                r.instance: r.best_energy for r in qls if not r.error
            }
            pairs = [
                (r.best_energy, by_instance[r.instance])
                for r in pqls
                if not r.error and r.instance in by_instance
            ]
            if pairs:
                wins, ties, losses, p_value = paired_comparison(
                    [p for p, _ in pairs], [q for _, q in pairs]
                )
                summary.pqls_wins, summary.ties, summary.pqls_losses = wins, ties, losses
                summary.sign_test_p = p_value
        summaries.append(summary)
    return summaries


def write_summary(summaries: Sequence[PointSummary], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SUMMARY_FIELDS)
        for summary in summaries:
            writer.writerow(summary.to_row())
    return path


def run_sweep(
    config: ExperimentConfig,
    output: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
) -> SweepReport:
    """
    Run every point of ``config`` and write the results CSV and its summary.

    (point, instance) tasks may run in a process pool; rows are written in
    point, instance, method order as results arrive. Each row is flushed so an
    interrupted sweep leaves complete rows behind.

    Args:
        config: Validated experiment configuration
        output: CSV path (defaults to ``config.output``)
        workers: Worker processes (flag, then config, then PQLS_WORKERS, then CPU count)

    Returns:
        SweepReport
    """
    config.validate()
    csv_path = Path(output if output is not None else config.output)
    workers = resolve_workers(workers or config.workers or None)
    logger.info(
        "sweep %s: %d points x %d instances, %d workers",
        config.experiment_id, len(config.points()), config.instances_per_point, workers,
    )

    csv_path.parent.mkdir(parents=True, exist_ok=True)
    records: List[RunRecord] = []
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        f.flush()
        for rows in _iter_results(config, workers):
            for row in rows:
                writer.writerow(row.to_row())
            f.flush()
            records.extend(rows)

    summaries = summarize(records)
    summary_path = write_summary(summaries, summary_path_for(csv_path))
    return SweepReport(
        records=records, summaries=summaries, csv_path=csv_path, summary_path=summary_path
    )
