"""
The sub-problem solver contract shared by the classical and VQE solvers.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from .ising import IsingProblem, SpinConfiguration

SUBSOLVER_KINDS = ("exact", "annealing", "tabu", "vqe")


class SubproblemTooLargeError(ValueError):
    """A solver was asked for more variables than its enumeration budget."""

    def __init__(self, solver: str, n: int, limit: int):
        super().__init__(f"{solver} solver handles at most {limit} variables, got {n}")
        self.n = n
        self.limit = limit


@dataclass(frozen=True)
class SolveOutcome:
    """Result of one sub-problem solve; ``energy`` excludes any clamping offset."""
    config: SpinConfiguration
    energy: float
    evaluations: int


@dataclass(frozen=True)
class VqeSpec:
    """
    Statevector VQE settings.

    ``iterations`` counts SPSA steps. ``shots`` = 0 reads out the most probable
    basis state instead of sampling.
    """
    layers: int = 2
    iterations: int = 100
    shots: int = 1024
    a: float = 0.2
    c: float = 0.1
    stability: float = 10.0
    alpha: float = 0.602
    gamma: float = 0.101

    @property
    def spsa_gains(self) -> Tuple[float, float, float, float, float]:
        """(a, c, A, alpha, gamma)."""
        return (self.a, self.c, self.stability, self.alpha, self.gamma)

    def validate(self) -> None:
        """
        Raises:
            ValueError: If a setting is out of range
        """
        if self.layers < 1:
            raise ValueError("VQE layers must be at least 1")
        if self.iterations < 1:
            raise ValueError("VQE iterations must be at least 1")
        if self.shots < 0:
            raise ValueError("VQE shots must be non-negative")
        if self.a <= 0 or self.c <= 0 or self.stability < 0:
            raise ValueError("SPSA gains a, c must be positive and A non-negative")
        for name, value in (("alpha", self.alpha), ("gamma", self.gamma)):
            if not 0 < value <= 1:
                raise ValueError(f"SPSA {name} must lie in (0, 1], got {value}")


@dataclass(frozen=True)
class SubsolverSpec:
    """
    Which solver handles sub-problems, with its parameters.

    Unused parameters are ignored by the other kinds. ``tenure`` and ``budget``
    default to max(4, n // 4) and 200 * n for an n-variable problem.
    """
    kind: str = "exact"
    sweeps: int = 100
    t_initial: float = 2.0
    t_final: float = 0.05
    tenure: Optional[int] = None
    budget: Optional[int] = None
    restarts: int = 1
    vqe: VqeSpec = field(default_factory=VqeSpec)

    def validate(self) -> None:
        """
        Raises:
            ValueError: If the kind or a parameter is invalid
        """
        if self.kind not in SUBSOLVER_KINDS:
            raise ValueError(
                f"Unknown subsolver '{self.kind}', expected one of {', '.join(SUBSOLVER_KINDS)}"
            )
        if self.sweeps < 1:
            raise ValueError("Annealing sweeps must be at least 1")
        if not self.t_initial >= self.t_final > 0:
            raise ValueError("Temperatures must satisfy t_initial >= t_final > 0")
        if self.tenure is not None and self.tenure < 0:
            raise ValueError("Tabu tenure must be non-negative")
        if self.budget is not None and self.budget < 1:
            raise ValueError("Tabu budget must be at least 1")
        if self.restarts < 1:
            raise ValueError("Tabu restarts must be at least 1")
        if self.kind == "vqe":
            self.vqe.validate()

    def tabu_tenure(self, n: int) -> int:
        return self.tenure if self.tenure is not None else max(4, n // 4)

    def tabu_budget(self, n: int) -> int:
        return self.budget if self.budget is not None else 200 * n

    def with_vqe_iterations(self, iterations: int) -> "SubsolverSpec":
        return replace(self, vqe=replace(self.vqe, iterations=iterations))


def baseline_spec(restarts: int = 20, tenure: Optional[int] = None,
                  budget: Optional[int] = None) -> SubsolverSpec:
    """The full-problem tabu baseline: default tenure and budget, 20 restarts."""
    return SubsolverSpec(kind="tabu", tenure=tenure, budget=budget, restarts=restarts)


def solve_subproblem(
    inner: IsingProblem,
    spec: SubsolverSpec,
    seed: int,
    initial: Optional[SpinConfiguration] = None,
) -> SolveOutcome:
    """
    Solve ``inner`` with the solver named by ``spec.kind``.

    Args:
        inner: Problem to minimize
        spec: Solver selection and parameters
        seed: Seed for stochastic solvers
        initial: Starting configuration, used by tabu search only

    Returns:
        SolveOutcome
    """
    from .classical import solve_annealing, solve_exact, solve_tabu
    from .vqe import solve_vqe

    if spec.kind == "exact":
        return solve_exact(inner)
    if spec.kind == "annealing":
        return solve_annealing(inner, spec, seed)
    if spec.kind == "tabu":
        return solve_tabu(inner, spec, seed, initial)
    if spec.kind == "vqe":
        return solve_vqe(inner, spec.vqe, seed)
    raise ValueError(f"Unknown subsolver '{spec.kind}'")
