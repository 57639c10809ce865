"""
Classical sub-problem solvers: exhaustive enumeration, simulated annealing and
single-flip tabu search.
"""

import math
from typing import Optional, Tuple

import numpy as np

from .ising import (
    DimensionError,
    IsingProblem,
    SpinConfiguration,
    diagonal_energies,
    energy,
    spins_of_index,
)
from .subsolver import SolveOutcome, SubproblemTooLargeError, SubsolverSpec
from .utils import as_seed

EXACT_LIMIT = 24
ENUMERATION_CHUNK = 1 << 16


def solve_exact(inner: IsingProblem) -> SolveOutcome:
    """
    Find a ground state by enumerating all 2**n basis indices.

    Index z maps bit k-1 to variable k (0 -> +1, 1 -> -1); among equal
    energies the smallest z wins.

    Raises:
        SubproblemTooLargeError: If n exceeds EXACT_LIMIT
    """
    n = inner.n
    if n > EXACT_LIMIT:
        raise SubproblemTooLargeError("exact", n, EXACT_LIMIT)

    total = 1 << n
    best_energy = math.inf
    best_index = 0
    for start in range(0, total, ENUMERATION_CHUNK):
        stop = min(start + ENUMERATION_CHUNK, total)
        energies = diagonal_energies(inner, start, stop)
        k = int(np.argmin(energies))
        if energies[k] < best_energy:
            best_energy = float(energies[k])
            best_index = start + k

    config = spins_of_index(best_index, n)
    return SolveOutcome(config=config, energy=energy(inner, config), evaluations=total)


def _start(
    inner: IsingProblem, rng: np.random.Generator, initial: Optional[SpinConfiguration]
) -> np.ndarray:
    if initial is None:
        return SpinConfiguration.random(inner.n, rng).as_float()
    if len(initial) != inner.n:
        raise DimensionError(
            f"Initial configuration has {len(initial)} spins, problem has {inner.n}"
        )
    return initial.as_float()


def solve_annealing(
    inner: IsingProblem,
    spec: SubsolverSpec,
    seed: int,
    initial: Optional[SpinConfiguration] = None,
) -> SolveOutcome:
    """
    Metropolis single-flip simulated annealing with a geometric schedule.

    Each of ``spec.sweeps`` sweeps visits the variables in index order at one
    temperature; temperatures fall geometrically from ``t_initial`` to
    ``t_final``. The best configuration seen is returned.

    Args:
        inner: Problem to minimize
        spec: Annealing parameters
        seed: Random seed
        initial: Starting configuration (random if omitted)

    Returns:
        SolveOutcome
    """
    spec.validate()
    rng = np.random.default_rng(as_seed(seed))
    s = _start(inner, rng, initial)
    coupling = inner.matrix
    local = inner.fields + coupling @ s

    current = float(s @ inner.upper @ s + inner.fields @ s)
    best_energy = current
    best = s.copy()
    evaluations = 1

    for temperature in np.geomspace(spec.t_initial, spec.t_final, spec.sweeps):
        thresholds = rng.random(inner.n)
        for i in range(inner.n):
            delta = -2.0 * s[i] * local[i]
            evaluations += 1
            if delta <= 0.0 or thresholds[i] < math.exp(-delta / temperature):
                s[i] = -s[i]
                local += (2.0 * s[i]) * coupling[:, i]
                current += delta
                if current < best_energy:
                    best_energy = current
                    best = s.copy()

    config = SpinConfiguration(best)
    return SolveOutcome(config=config, energy=energy(inner, config), evaluations=evaluations)


def _tabu_run(
    inner: IsingProblem, s: np.ndarray, tenure: int, budget: int
) -> Tuple[np.ndarray, float, int]:
    coupling = inner.matrix
    local = inner.fields + coupling @ s
    deltas = -2.0 * s * local
    current = float(s @ inner.upper @ s + inner.fields @ s)
    best_energy = current
    best = s.copy()
    tabu_until = np.zeros(inner.n, dtype=np.int64)
    evaluations = inner.n

    for iteration in range(budget):
        allowed = (tabu_until <= iteration) | (current + deltas < best_energy)
        if not allowed.any():
            continue
        k = int(np.argmin(np.where(allowed, deltas, np.inf)))

        current += deltas[k]
        s[k] = -s[k]
        local += (2.0 * s[k]) * coupling[:, k]
        deltas = -2.0 * s * local
        evaluations += inner.n
        tabu_until[k] = iteration + tenure + 1

        if current < best_energy:
            best_energy = current
            best = s.copy()

    return best, best_energy, evaluations


def solve_tabu(
    problem: IsingProblem,
    spec: SubsolverSpec,
    seed: int,
    initial: Optional[SpinConfiguration] = None,
) -> SolveOutcome:
    """
    Single-flip tabu search with aspiration.

    Every iteration takes the allowed flip with the lowest energy change (lowest
    index on ties), even when it goes uphill. A flipped variable stays tabu for
    ``tenure`` iterations unless flipping it would beat the best energy seen.
    With several restarts the first starts from ``initial`` (when given) and the
    rest from random configurations; the overall best is returned.

    Args:
        problem: Problem to minimize
        spec: Tabu parameters (tenure, budget, restarts)
        seed: Random seed
        initial: Starting configuration for the first restart

    Returns:
        SolveOutcome
    """
    spec.validate()
    rng = np.random.default_rng(as_seed(seed))
    tenure = spec.tabu_tenure(problem.n)
    budget = spec.tabu_budget(problem.n)

    best: Optional[np.ndarray] = None
    best_energy = math.inf
    evaluations = 0
    for restart in range(spec.restarts):
        start = _start(problem, rng, initial if restart == 0 else None)
        candidate, candidate_energy, used = _tabu_run(problem, start, tenure, budget)
        evaluations += used
        if candidate_energy < best_energy:
            best, best_energy = candidate, candidate_energy

    config = SpinConfiguration(best)
    return SolveOutcome(config=config, energy=energy(problem, config), evaluations=evaluations)
