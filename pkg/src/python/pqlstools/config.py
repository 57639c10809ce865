"""
Experiment configuration: a flat TOML schema whose keys are the ExperimentConfig fields.
"""

import dataclasses
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .engine import ACCEPT_RULES
from .subsolver import SubsolverSpec, VqeSpec, baseline_spec

SWEEP_KINDS = ("grid_np_ng", "branches", "unit_length", "vqe_iters", "custom")
METHODS = ("pqls", "qls", "qls_work")
AXES = ("n_p", "n_g", "branches", "unit_length", "vqe_iterations")


class ConfigError(ValueError):
    """Experiment configuration is invalid."""


@dataclass(frozen=True)
class ExperimentPoint:
    """One coordinate of a sweep; ``vqe_iterations`` is 0 unless the subsolver is VQE."""
    index: int
    n_p: int
    n_g: int
    branches: int
    unit_length: int
    generations: int
    vqe_iterations: int


@dataclass
class ExperimentConfig:
    """
    A sweep over the Cartesian product of the axis lists.

    With ``total_budget`` set, every point runs total_budget / unit_length
    generations and the division must be exact; the unit_length sweep
    requires it.
    """
    experiment_id: str = "sweep"
    sweep: str = "custom"
    n_p: List[int] = field(default_factory=lambda: [36])
    n_g: List[int] = field(default_factory=lambda: [10])
    branches: List[int] = field(default_factory=lambda: [32])
    unit_length: List[int] = field(default_factory=lambda: [100])
    generations: int = 10
    total_budget: Optional[int] = None
    vqe_iterations: List[int] = field(default_factory=lambda: [100])
    instances_per_point: int = 5
    master_seed: int = 0
    methods: List[str] = field(default_factory=lambda: ["pqls", "qls"])
    accept_rule: str = "improve_or_equal"
    subsolver: str = "exact"
    anneal_sweeps: int = 100
    t_initial: float = 2.0
    t_final: float = 0.05
    tabu_tenure: Optional[int] = None
    tabu_budget: Optional[int] = None
    vqe_layers: int = 2
    vqe_shots: int = 1024
    baseline_tenure: Optional[int] = None
    baseline_budget: Optional[int] = None
    baseline_restarts: int = 20
    workers: int = 0
    output: str = "results.csv"

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """
        Build and validate a config from parsed TOML.

        Axis keys accept a scalar or a list.

        Raises:
            ConfigError: On an unknown key, a wrongly typed value or failed validation
        """
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

        values: Dict[str, Any] = {}
        for key, value in data.items():
            if key in AXES:
                items = value if isinstance(value, list) else [value]
                values[key] = [_as_int(key, item) for item in items]
            elif key == "methods":
                items = value if isinstance(value, list) else [value]
                values[key] = [_as_str(key, item) for item in items]
            elif key in ("t_initial", "t_final"):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"'{key}' must be a number")
                values[key] = float(value)
            elif key in ("experiment_id", "sweep", "accept_rule", "subsolver", "output"):
                values[key] = _as_str(key, value)
            else:
                values[key] = _as_int(key, value)

        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> None:
        """
        Raises:
            ConfigError: If any setting is invalid
        """
        if self.sweep not in SWEEP_KINDS:
            raise ConfigError(f"Unknown sweep '{self.sweep}', expected one of {', '.join(SWEEP_KINDS)}")
        for axis in AXES:
            items = getattr(self, axis)
            if not items:
                raise ConfigError(f"Axis '{axis}' must not be empty")
            if any(item < 1 for item in items):
                raise ConfigError(f"Axis '{axis}' values must be at least 1")
        if not self.methods:
            raise ConfigError("'methods' must not be empty")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(f"Unknown method '{method}', expected one of {', '.join(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("'methods' must not repeat")
        if self.accept_rule not in ACCEPT_RULES:
            raise ConfigError(f"Unknown accept rule '{self.accept_rule}'")
        for key in ("generations", "instances_per_point"):
            if getattr(self, key) < 1:
                raise ConfigError(f"'{key}' must be at least 1")
        if self.workers < 0:
            raise ConfigError("'workers' must be non-negative (0 = automatic)")

        if self.sweep == "unit_length" and self.total_budget is None:
            raise ConfigError("A unit_length sweep needs 'total_budget'")
        if self.total_budget is not None:
            if self.total_budget < 1:
                raise ConfigError("'total_budget' must be at least 1")
            for length in self.unit_length:
                if self.total_budget % length:
                    raise ConfigError(
                        f"total_budget {self.total_budget} is not a multiple of unit_length {length}"
                    )
        if self.subsolver != "vqe":
            if self.sweep == "vqe_iters":
                raise ConfigError("A vqe_iters sweep needs subsolver = \"vqe\"")
            if len(self.vqe_iterations) > 1:
                raise ConfigError("'vqe_iterations' has several values but the subsolver is not VQE")
        for n_p, n_g in itertools.product(self.n_p, self.n_g):
            if n_g > n_p:
                raise ConfigError(f"Sub-problem size {n_g} exceeds problem size {n_p}")

        try:
            self.subsolver_spec(self.vqe_iterations[0]).validate()
            self.baseline_spec().validate()
        except ValueError as e:
            raise ConfigError(str(e))

    def subsolver_spec(self, vqe_iterations: int) -> SubsolverSpec:
        """Subsolver settings for a point (``vqe_iterations`` ignored unless VQE)."""
        return SubsolverSpec(
            kind=self.subsolver,
            sweeps=self.anneal_sweeps,
            t_initial=self.t_initial,
            t_final=self.t_final,
            tenure=self.tabu_tenure,
            budget=self.tabu_budget,
            vqe=VqeSpec(
                layers=self.vqe_layers,
                iterations=max(vqe_iterations, 1),
                shots=self.vqe_shots,
            ),
        )

    def baseline_spec(self) -> SubsolverSpec:
        return baseline_spec(
            restarts=self.baseline_restarts,
            tenure=self.baseline_tenure,
            budget=self.baseline_budget,
        )

    def points(self) -> List[ExperimentPoint]:
        """Points in axis order n_p, n_g, branches, unit_length, vqe_iterations."""
        vqe_axis = self.vqe_iterations if self.subsolver == "vqe" else [0]
        product = itertools.product(self.n_p, self.n_g, self.branches, self.unit_length, vqe_axis)
        return [
            ExperimentPoint(
                index=index,
                n_p=n_p,
                n_g=n_g,
                branches=branches,
                unit_length=length,
                generations=(
                    self.total_budget // length if self.total_budget is not None else self.generations
                ),
                vqe_iterations=iterations,
            )
            for index, (n_p, n_g, branches, length, iterations) in enumerate(product, 1)
        ]


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    return value


def _as_str(key: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"'{key}' must be a string, got {value!r}")
    return value


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read a TOML experiment configuration.

    Raises:
        ConfigError: If the file is not valid TOML or fails validation
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML in {path}: {e}")
    return ExperimentConfig.from_mapping(data)
