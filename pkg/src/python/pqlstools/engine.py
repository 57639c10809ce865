"""
Quantum local search (QLS) branches and the parallel generational orchestrator (PQLS).

A branch repeatedly clamps a random subset of variables, solves the clamped
sub-problem and embeds the result. A generation fans B branches out from the
incumbent, keeps the lowest-energy branch (lowest index on ties) and hands its
best configuration to the next generation.
"""

import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .ising import (
    IsingProblem,
    SpinConfiguration,
    embed_solution,
    energy,
    extract_subproblem,
    restrict_configuration,
)
from .subsolver import SubsolverSpec, solve_subproblem
from .utils import derive_seed

logger = logging.getLogger(__name__)

ACCEPT_RULES = ("improve_or_equal", "always")


@dataclass(frozen=True)
class PqlsParams:
    """
    Orchestration settings.

    ``workers`` only chooses how branches are scheduled; results do not
    depend on it. ``keep_branches`` retains every BranchResult in the output.
    """
    sub_size: int
    branches: int = 1
    unit_length: int = 1
    generations: int = 1
    subsolver: SubsolverSpec = field(default_factory=SubsolverSpec)
    master_seed: int = 0
    accept_rule: str = "improve_or_equal"
    workers: int = 1
    keep_branches: bool = False

    def validate(self, n: Optional[int] = None) -> None:
        """
        Raises:
            ValueError: If a count is below 1, sub_size exceeds n, or a rule is unknown
        """
        for name in ("sub_size", "branches", "unit_length", "generations", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if n is not None and self.sub_size > n:
            raise ValueError(f"sub_size {self.sub_size} exceeds problem size {n}")
        if self.accept_rule not in ACCEPT_RULES:
            raise ValueError(
                f"Unknown accept rule '{self.accept_rule}', expected one of {', '.join(ACCEPT_RULES)}"
            )
        self.subsolver.validate()


@dataclass(frozen=True)
class BranchResult:
    """Best configuration of one branch and its best-so-far energy per iteration."""
    best_config: SpinConfiguration
    best_energy: float
    trajectory: Tuple[float, ...]
    branch_index: int


@dataclass(frozen=True)
class PqlsResult:
    """Outcome of a PQLS run; ``per_generation`` holds the incumbent energy after each generation."""
    best_config: SpinConfiguration
    best_energy: float
    per_generation: Tuple[float, ...]
    generation_winners: Tuple[int, ...]
    subsolver_calls: int
    per_branch: Optional[Tuple[Tuple[BranchResult, ...], ...]] = None


def qls_step(
    problem: IsingProblem,
    current: SpinConfiguration,
    sub_size: int,
    subsolver: SubsolverSpec,
    rng: np.random.Generator,
    accept_rule: str = "improve_or_equal",
) -> SpinConfiguration:
    """
    One local-search iteration.

    Draws ``sub_size`` distinct variables uniformly, then a subsolver seed, from
    ``rng``; solves the clamped sub-problem and embeds the answer. Under
    ``improve_or_equal`` the embedded configuration replaces ``current`` only if
    its energy is not higher.

    Returns:
        The next configuration
    """
    if sub_size > problem.n:
        raise ValueError(f"sub_size {sub_size} exceeds problem size {problem.n}")

    subset = np.sort(rng.choice(problem.n, size=sub_size, replace=False)) + 1
    seed = int(rng.integers(0, 2**63))
    sub = extract_subproblem(problem, current, subset)
    outcome = solve_subproblem(
        sub.inner, subsolver, seed, initial=restrict_configuration(current, subset)
    )
    candidate = embed_solution(current, subset, outcome.config)

    if accept_rule == "always":
        return candidate
    # Same acceptance as energy(inner) + offset <= energy(current), by the clamping identity.
    if energy(problem, candidate) <= energy(problem, current):
        return candidate
    return current


def run_branch(
    problem: IsingProblem,
    initial: SpinConfiguration,
    params: PqlsParams,
    generation_index: int,
    branch_index: int,
) -> BranchResult:
    """
    Run ``params.unit_length`` QLS steps from ``initial``.

    The branch draws from a generator seeded with
    derive_seed(master_seed, generation_index, branch_index).
    """
    rng = np.random.default_rng(derive_seed(params.master_seed, generation_index, branch_index))
    current = initial
    best_config = initial
    best_energy = energy(problem, initial)
    trajectory = []

    for _ in range(params.unit_length):
        current = qls_step(
            problem, current, params.sub_size, params.subsolver, rng, params.accept_rule
        )
        current_energy = energy(problem, current)
        if current_energy < best_energy:
            best_config, best_energy = current, current_energy
        trajectory.append(best_energy)

    return BranchResult(
        best_config=best_config,
        best_energy=best_energy,
        trajectory=tuple(trajectory),
        branch_index=branch_index,
    )


def _branch_task(
    args: Tuple[IsingProblem, SpinConfiguration, PqlsParams, int, int]
) -> BranchResult:
    return run_branch(*args)


def initial_configuration(problem: IsingProblem, master_seed: int) -> SpinConfiguration:
    """Uniform random spins from the reserved stream (generation 0, branch 0)."""
    rng = np.random.default_rng(derive_seed(master_seed, 0, 0))
    return SpinConfiguration.random(problem.n, rng)


def _run_generations(
    problem: IsingProblem,
    incumbent: SpinConfiguration,
    params: PqlsParams,
    executor: Optional[Executor],
) -> PqlsResult:
    incumbent_energy = energy(problem, incumbent)
    per_generation: List[float] = []
    winners: List[int] = []
    retained: List[Tuple[BranchResult, ...]] = []

    for g in range(1, params.generations + 1):
        tasks = [(problem, incumbent, params, g, b) for b in range(1, params.branches + 1)]
        if executor is None:
            results = tuple(map(_branch_task, tasks))
        else:
            results = tuple(executor.map(_branch_task, tasks))

        winner = min(results, key=lambda r: (r.best_energy, r.branch_index))
        if winner.best_energy <= incumbent_energy:
            incumbent, incumbent_energy = winner.best_config, winner.best_energy
        per_generation.append(incumbent_energy)
        winners.append(winner.branch_index)
        if params.keep_branches:
            retained.append(results)
        logger.debug(
            "generation %d/%d: branch %d wins, incumbent energy %.6f",
            g, params.generations, winner.branch_index, incumbent_energy,
        )

    return PqlsResult(
        best_config=incumbent,
        best_energy=incumbent_energy,
        per_generation=tuple(per_generation),
        generation_winners=tuple(winners),
        subsolver_calls=params.branches * params.unit_length * params.generations,
        per_branch=tuple(retained) if params.keep_branches else None,
    )


def run_pqls(
    problem: IsingProblem,
    initial: Optional[SpinConfiguration],
    params: PqlsParams,
) -> PqlsResult:
    """
    Run ``params.generations`` generations of ``params.branches`` QLS branches.

    All branches of a generation start from the incumbent (``initial``, or
    random spins from the master seed, for the first). The generation winner
    replaces the incumbent unless it is worse. With ``params.workers`` > 1 the
    branches of each generation run in a process pool; the result is the same
    as a serial run.

    Returns:
        PqlsResult
    """
    params.validate(problem.n)
    if initial is None:
        initial = initial_configuration(problem, params.master_seed)
    elif len(initial) != problem.n:
        raise ValueError(f"Initial configuration has {len(initial)} spins, problem has {problem.n}")

    workers = min(params.workers, params.branches)
    if workers <= 1:
        return _run_generations(problem, initial, params, None)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return _run_generations(problem, initial, params, executor)


def run_qls(
    problem: IsingProblem,
    initial: Optional[SpinConfiguration],
    total_iterations: int,
    sub_size: int,
    subsolver: SubsolverSpec,
    seed: int,
    accept_rule: str = "improve_or_equal",
) -> BranchResult:
    """
    Sequential QLS: a single branch of ``total_iterations`` steps.

    Equivalent to run_branch with generation and branch index 1.
    """
    params = PqlsParams(
        sub_size=sub_size,
        branches=1,
        unit_length=total_iterations,
        generations=1,
        subsolver=subsolver,
        master_seed=seed,
        accept_rule=accept_rule,
        keep_branches=True,
    )
    result = run_pqls(problem, initial, params)
    return result.per_branch[0][0]
