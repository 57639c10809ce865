"""
PQLS Tools - parallel quantum local search for Ising optimization.

This library provides:
- Ising problems, spin configurations and sub-problem clamping
- Instance generation and a plain-text instance format
- Exact, simulated annealing, tabu and statevector VQE sub-problem solvers
- Sequential QLS and the generational parallel orchestrator (PQLS)
- Config-driven experiment sweeps with CSV results and summaries
"""

__version__ = "0.1.0"
__author__ = "Parallel QLS Project"

from .ising import (
    DimensionError, IsingProblem, SpinConfiguration, SubProblem, SubsetError,
    embed_solution, energy, delta_energy_flip, extract_subproblem,
    generate_instance, restrict_configuration
)
from .instance import InstanceFormatError, load_instance, read_instance, save_instance, write_instance
from .subsolver import (
    SolveOutcome, SubproblemTooLargeError, SubsolverSpec, VqeSpec,
    baseline_spec, solve_subproblem
)
from .classical import solve_annealing, solve_exact, solve_tabu
from .vqe import ansatz_state, expectation, optimize_vqe, solve_vqe
from .engine import BranchResult, PqlsParams, PqlsResult, qls_step, run_branch, run_pqls, run_qls
from .utils import derive_seed

# Experiment harness (needs scipy and, on Python < 3.11, tomli)
try:
    from .config import ConfigError, ExperimentConfig, load_config
    from .experiment import MetricUndefinedError, RunRecord, approximation_ratio, run_point, run_sweep
except ImportError:
    ConfigError = ExperimentConfig = load_config = None
    MetricUndefinedError = RunRecord = approximation_ratio = run_point = run_sweep = None

__all__ = [
    # Core model
    'IsingProblem',
    'SpinConfiguration',
    'SubProblem',
    'energy',
    'delta_energy_flip',
    'extract_subproblem',
    'embed_solution',
    'restrict_configuration',
    'generate_instance',

    # Instance files
    'read_instance',
    'write_instance',
    'load_instance',
    'save_instance',

    # Solvers
    'SubsolverSpec',
    'VqeSpec',
    'SolveOutcome',
    'baseline_spec',
    'solve_subproblem',
    'solve_exact',
    'solve_annealing',
    'solve_tabu',
    'solve_vqe',
    'optimize_vqe',
    'ansatz_state',
    'expectation',

    # Engine
    'PqlsParams',
    'PqlsResult',
    'BranchResult',
    'qls_step',
    'run_branch',
    'run_pqls',
    'run_qls',
    'derive_seed',

    # Errors
    'DimensionError',
    'SubsetError',
    'InstanceFormatError',
    'SubproblemTooLargeError',
    'ConfigError',
    'MetricUndefinedError',

    # Experiments (if available)
    'ExperimentConfig',
    'load_config',
    'RunRecord',
    'approximation_ratio',
    'run_point',
    'run_sweep',
]
