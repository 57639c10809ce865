"""
Ising problems, spin configurations, clamped sub-problems and instance generation.

Energy convention: E(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i, each unordered
pair counted once. Variable indices on the public surface are 1-based.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .utils import as_seed

Coupling = Tuple[int, int]


class DimensionError(ValueError):
    """Configuration length or variable index does not fit the problem."""


class SubsetError(ValueError):
    """Variable subset is empty, unsorted, repeated or out of range."""


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class IsingProblem:
    """
    Couplings J_ij (i < j) and fields h_i over n spin variables.

    Instances are immutable; the dense upper-triangular and symmetric coupling
    matrices are built once at construction.
    """

    def __init__(
        self,
        n: int,
        couplings: Optional[Mapping[Coupling, float]] = None,
        fields: Optional[Sequence[float]] = None,
    ):
        """
        Initialize an Ising problem.

        Args:
            n: Number of spin variables (>= 1)
            couplings: Map from 1-based (i, j), i < j, to J_ij
            fields: n linear coefficients h_i (all zero if omitted)

        Raises:
            ValueError: If n, an index or a coefficient is invalid
        """
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"Problem size must be a positive integer, got {n!r}")
        self._n = int(n)

        if fields is None:
            h = np.zeros(self._n)
        else:
            h = np.array(fields, dtype=float)
            if h.shape != (self._n,):
                raise DimensionError(f"Expected {self._n} fields, got {h.size}")
        if not np.all(np.isfinite(h)):
            raise ValueError("Fields must be finite")
        self._fields = _readonly(h)

        clean: Dict[Coupling, float] = {}
        for key, value in (couplings or {}).items():
            i, j = key
            i, j = int(i), int(j)
            if i >= j:
                raise ValueError(f"Coupling indices must satisfy i < j, got ({i}, {j})")
            if i < 1 or j > self._n:
                raise ValueError(f"Coupling ({i}, {j}) out of range for n={self._n}")
            if (i, j) in clean:
                raise ValueError(f"Duplicate coupling ({i}, {j})")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"Coupling ({i}, {j}) must be finite")
            clean[(i, j)] = value
        self._couplings = dict(sorted(clean.items()))

        pairs = np.array(list(self._couplings), dtype=np.intp).reshape(-1, 2) - 1
        values = np.fromiter(self._couplings.values(), dtype=float, count=len(self._couplings))
        upper = np.zeros((self._n, self._n))
        upper[pairs[:, 0], pairs[:, 1]] = values
        self._pairs = _readonly(pairs)
        self._values = _readonly(values)
        self._upper = _readonly(upper)
        self._matrix = _readonly(upper + upper.T)

    @property
    def n(self) -> int:
        """Number of spin variables."""
        return self._n

    @property
    def couplings(self) -> Mapping[Coupling, float]:
        """Read-only view of the coupling map, keys sorted lexicographically."""
        return MappingProxyType(self._couplings)

    @property
    def fields(self) -> np.ndarray:
        """Read-only array of the n fields."""
        return self._fields

    @property
    def upper(self) -> np.ndarray:
        """Dense n x n matrix with J_ij in the strict upper triangle."""
        return self._upper

    @property
    def matrix(self) -> np.ndarray:
        """Dense symmetric n x n coupling matrix with zero diagonal."""
        return self._matrix

    @property
    def coupling_pairs(self) -> np.ndarray:
        """0-based (i, j) rows matching ``coupling_values``."""
        return self._pairs

    @property
    def coupling_values(self) -> np.ndarray:
        return self._values

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IsingProblem):
            return NotImplemented
        return (
            self._n == other._n
            and self._couplings == other._couplings
            and np.array_equal(self._fields, other._fields)
        )

    def __hash__(self) -> int:
        return hash((self._n, tuple(self._couplings.items()), self._fields.tobytes()))

    def __repr__(self) -> str:
        return f"IsingProblem(n={self._n}, couplings={len(self._couplings)})"


class SpinConfiguration:
    """An immutable assignment of -1/+1 to every spin variable."""

    def __init__(self, spins: Sequence[int]):
        """
        Initialize a configuration.

        Args:
            spins: Sequence of -1/+1 values

        Raises:
            ValueError: If the sequence is empty, not 1-D or holds other values
        """
        array = np.asarray(spins)
        if array.ndim != 1 or array.size == 0:
            raise ValueError("Spins must be a non-empty 1-D sequence")
        if not np.all((array == 1) | (array == -1)):
            raise ValueError("Every spin must be -1 or +1")
        self._spins = _readonly(array.astype(np.int8))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "SpinConfiguration":
        """Draw n independent uniform spins from ``rng``."""
        return cls(1 - 2 * rng.integers(0, 2, size=n))

    @property
    def spins(self) -> np.ndarray:
        """Read-only int8 array of spins."""
        return self._spins

    def as_float(self) -> np.ndarray:
        """Spins as a fresh float64 array."""
        return self._spins.astype(float)

    def flipped(self, i: int) -> "SpinConfiguration":
        """Return a copy with the 1-based variable ``i`` negated."""
        index = _check_index(i, len(self))
        spins = self._spins.copy()
        spins[index] = -spins[index]
        return SpinConfiguration(spins)

    def __neg__(self) -> "SpinConfiguration":
        return SpinConfiguration(-self._spins)

    def to_list(self) -> List[int]:
        return [int(s) for s in self._spins]

    def __len__(self) -> int:
        return int(self._spins.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self.to_list())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpinConfiguration):
            return NotImplemented
        return np.array_equal(self._spins, other._spins)

    def __hash__(self) -> int:
        return hash(self._spins.tobytes())

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self._spins)

    def __repr__(self) -> str:
        return f"SpinConfiguration('{self}')"


@dataclass(frozen=True)
class SubProblem:
    """
    A clamped problem over ``subset`` (1-based, ascending).

    energy(inner, t) + offset equals the parent energy of the configuration
    with t embedded at ``subset``.
    """
    inner: IsingProblem
    subset: Tuple[int, ...]
    offset: float


def _check_index(i: int, n: int) -> int:
    if not 1 <= i <= n:
        raise DimensionError(f"Variable index {i} out of range 1..{n}")
    return int(i) - 1


def _check_config(problem: IsingProblem, config: SpinConfiguration) -> None:
    if len(config) != problem.n:
        raise DimensionError(
            f"Configuration has {len(config)} spins, problem has {problem.n}"
        )


def subset_positions(subset: Sequence[int], n: int) -> np.ndarray:
    """
    Validate a 1-based subset and return its 0-based positions.

    Raises:
        SubsetError: If the subset is empty, non-integral, not strictly ascending or out of range
    """
    raw = np.asarray(subset).reshape(-1)
    if raw.size == 0:
        raise SubsetError("Subset must not be empty")
    if raw.dtype == np.bool_ or not np.issubdtype(raw.dtype, np.integer):
        raise SubsetError(f"Subset indices must be integers, got {list(subset)!r}")
    positions = raw.astype(np.intp) - 1
    if positions[0] < 0 or positions[-1] >= n:
        raise SubsetError(f"Subset indices must lie in 1..{n}")
    if positions.size > 1 and np.any(np.diff(positions) <= 0):
        raise SubsetError("Subset must be strictly ascending")
    return positions


def energy(problem: IsingProblem, config: SpinConfiguration) -> float:
    """
    Evaluate E(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i.

    Raises:
        DimensionError: If the configuration length differs from n
    """
    _check_config(problem, config)
    s = config.as_float()
    return float(s @ problem.upper @ s + problem.fields @ s)


def delta_energy_flip(problem: IsingProblem, config: SpinConfiguration, i: int) -> float:
    """
    Energy change from negating the 1-based variable ``i``.

    Returns:
        -2 s_i (h_i + sum_{j != i} J_ij s_j)

    Raises:
        DimensionError: If ``i`` is out of range or lengths differ
    """
    _check_config(problem, config)
    index = _check_index(i, problem.n)
    s = config.as_float()
    local = problem.fields[index] + problem.matrix[index] @ s
    return float(-2.0 * s[index] * local)


def extract_subproblem(
    problem: IsingProblem, config: SpinConfiguration, subset: Sequence[int]
) -> SubProblem:
    """
    Clamp every variable outside ``subset`` at its value in ``config``.

    Clamped neighbours fold into the inner fields; clamped-clamped couplings and
    clamped fields fold into the offset.

    Raises:
        SubsetError: If the subset is invalid
        DimensionError: If the configuration length differs from n
    """
    _check_config(problem, config)
    inside = subset_positions(subset, problem.n)
    m = inside.size

    selected = np.zeros(problem.n, dtype=bool)
    selected[inside] = True
    outside = np.flatnonzero(~selected)
    position = np.full(problem.n, -1, dtype=np.intp)
    position[inside] = np.arange(m)

    s = config.as_float()
    s_out = s[outside]
    inner_fields = problem.fields[inside] + problem.matrix[np.ix_(inside, outside)] @ s_out
    offset = float(
        s_out @ problem.upper[np.ix_(outside, outside)] @ s_out + problem.fields[outside] @ s_out
    )

    pairs = problem.coupling_pairs
    keep = selected[pairs[:, 0]] & selected[pairs[:, 1]]
    inner_pairs = position[pairs[keep]] + 1
    inner_couplings = {
        (int(a), int(b)): float(v)
        for (a, b), v in zip(inner_pairs, problem.coupling_values[keep])
    }

    return SubProblem(
        inner=IsingProblem(m, inner_couplings, inner_fields),
        subset=tuple(int(k) + 1 for k in inside),
        offset=offset,
    )


def embed_solution(
    config: SpinConfiguration, subset: Sequence[int], sub: SpinConfiguration
) -> SpinConfiguration:
    """
    Replace the spins at ``subset`` with ``sub`` (in subset order).

    Raises:
        SubsetError: If the subset is invalid
        DimensionError: If ``sub`` does not match the subset size
    """
    positions = subset_positions(subset, len(config))
    if len(sub) != positions.size:
        raise DimensionError(
            f"Sub-solution has {len(sub)} spins, subset has {positions.size}"
        )
    spins = config.spins.copy()
    spins[positions] = sub.spins
    return SpinConfiguration(spins)


def restrict_configuration(config: SpinConfiguration, subset: Sequence[int]) -> SpinConfiguration:
    """Return the spins of ``config`` at ``subset``, in subset order."""
    positions = subset_positions(subset, len(config))
    return SpinConfiguration(config.spins[positions])


def generate_instance(n: int, seed: int) -> IsingProblem:
    """
    Draw a dense spin glass with every J_ij and h_i uniform on [-1, 1].

    Draw order: the n fields in ascending i, then the n(n-1)/2 couplings in
    (i, j) lexicographic order, all from numpy's default generator seeded with
    ``seed`` modulo 2**64.

    Args:
        n: Number of spins (>= 1)
        seed: Integer seed

    Returns:
        IsingProblem
    """
    if n < 1:
        raise ValueError("Problem size must be at least 1")
    rng = np.random.default_rng(as_seed(seed))
    fields = rng.uniform(-1.0, 1.0, size=n)
    rows, cols = np.triu_indices(n, k=1)
    values = rng.uniform(-1.0, 1.0, size=rows.size)
    couplings = {
        (int(i) + 1, int(j) + 1): float(v) for i, j, v in zip(rows, cols, values)
    }
    return IsingProblem(n, couplings, fields)


@lru_cache(maxsize=32)
def basis_spins(n: int) -> np.ndarray:
    """
    Spins of every basis index z in 0..2**n - 1, shape (2**n, n).

    Bit k-1 of z gives variable k; bit 0 maps to +1 and bit 1 to -1.
    """
    return _readonly(spins_for_indices(np.arange(1 << n), n))


def spins_for_indices(indices: np.ndarray, n: int) -> np.ndarray:
    """Spin rows (float64) for an array of basis indices."""
    bits = (np.asarray(indices, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    return 1.0 - 2.0 * bits


def diagonal_energies(problem: IsingProblem, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """
    Energies of the basis indices ``start`` .. ``stop - 1``.

    Uses the same index-to-spins mapping as :func:`basis_spins`.
    """
    n = problem.n
    if stop is None:
        stop = 1 << n
    if start == 0 and stop == 1 << n and n <= 16:
        spins = basis_spins(n)
    else:
        spins = spins_for_indices(np.arange(start, stop), n)
    return np.einsum("zi,zi->z", spins @ problem.upper, spins) + spins @ problem.fields


def spins_of_index(z: int, n: int) -> SpinConfiguration:
    """Configuration for a single basis index."""
    return SpinConfiguration([1 - 2 * ((z >> k) & 1) for k in range(n)])
