"""
Exact statevector VQE for diagonal (Ising) Hamiltonians.

Qubit k-1 carries variable k; basis index z has bit k-1 set when variable k is
-1, the same mapping the exact solver enumerates. The ansatz is
hardware-efficient: d+1 layers of per-qubit Y rotations with a ring of
controlled-Z gates between consecutive layers. Y rotations and controlled-Z
keep amplitudes real, so states are float64 arrays.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from .ising import DimensionError, IsingProblem, diagonal_energies, energy, spins_of_index
from .subsolver import SolveOutcome, SubproblemTooLargeError, VqeSpec
from .utils import as_seed

VQE_LIMIT = 16
INITIAL_SPREAD = 0.1


@dataclass(frozen=True)
class Statevector:
    """Real amplitudes of an m-qubit state, indexed by basis index z."""
    amplitudes: np.ndarray

    @property
    def num_qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))


@dataclass(frozen=True)
class VqeRun:
    """Best parameters found by SPSA and the best-seen expectation per step."""
    theta: np.ndarray
    expectation: float
    trace: Tuple[float, ...]
    evaluations: int


def hamiltonian_diagonal(inner: IsingProblem) -> np.ndarray:
    """
    Energies of all 2**m basis states.

    Raises:
        SubproblemTooLargeError: If m exceeds VQE_LIMIT
    """
    if inner.n > VQE_LIMIT:
        raise SubproblemTooLargeError("vqe", inner.n, VQE_LIMIT)
    return diagonal_energies(inner)


def ring_pairs(m: int) -> Tuple[Tuple[int, int], ...]:
    """Qubit pairs of the entangling ring: none for one qubit, one pair for two."""
    if m == 1:
        return ()
    if m == 2:
        return ((0, 1),)
    return tuple((k, (k + 1) % m) for k in range(m))


@lru_cache(maxsize=VQE_LIMIT)
def _ring_signs(m: int) -> np.ndarray:
    bits = (np.arange(1 << m)[:, None] >> np.arange(m)) & 1
    signs = np.ones(1 << m)
    for a, b in ring_pairs(m):
        signs[(bits[:, a] & bits[:, b]) == 1] *= -1.0
    signs.setflags(write=False)
    return signs


def _rotate_layer(state: np.ndarray, angles: np.ndarray, m: int) -> np.ndarray:
    for k, angle in enumerate(angles):
        view = state.reshape(1 << (m - 1 - k), 2, 1 << k)
        cos, sin = np.cos(angle / 2.0), np.sin(angle / 2.0)
        rotated = np.empty_like(view)
        rotated[:, 0, :] = cos * view[:, 0, :] - sin * view[:, 1, :]
        rotated[:, 1, :] = sin * view[:, 0, :] + cos * view[:, 1, :]
        state = rotated.reshape(-1)
    return state


def ansatz_state(theta: Sequence[float], m: int, d: int) -> Statevector:
    """
    Prepare the ansatz state from |0...0>.

    Args:
        theta: (d+1)*m rotation angles, layer by layer, qubit by qubit
        m: Number of qubits
        d: Number of entangling layers

    Returns:
        Statevector

    Raises:
        DimensionError: If theta has the wrong length
    """
    angles = np.asarray(theta, dtype=float)
    if angles.shape != ((d + 1) * m,):
        raise DimensionError(f"Expected {(d + 1) * m} parameters, got {angles.size}")

    state = np.zeros(1 << m)
    state[0] = 1.0
    layers = angles.reshape(d + 1, m)
    state = _rotate_layer(state, layers[0], m)
    signs = _ring_signs(m)
    for layer in layers[1:]:
        state = _rotate_layer(state * signs, layer, m)
    return Statevector(state)


def expectation(state: Statevector, diag: np.ndarray) -> float:
    """
    <psi|H|psi> for a diagonal H.

    Raises:
        DimensionError: If the state and diagonal sizes differ
    """
    diag = np.asarray(diag, dtype=float)
    probabilities = state.probabilities()
    if probabilities.shape != diag.shape:
        raise DimensionError(
            f"State has {probabilities.size} amplitudes, diagonal has {diag.size}"
        )
    return float(probabilities @ diag / probabilities.sum())


def _optimize(
    diag: np.ndarray, m: int, spec: VqeSpec, rng: np.random.Generator
) -> VqeRun:
    d = spec.layers
    a, c, stability, alpha, gamma = spec.spsa_gains
    evaluations = 0

    def objective(params: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return expectation(ansatz_state(params, m, d), diag)

    theta = rng.uniform(-INITIAL_SPREAD, INITIAL_SPREAD, size=(d + 1) * m)
    best_theta = theta.copy()
    best_value = objective(theta)
    trace = []

    for k in range(spec.iterations):
        gain = a / (k + 1 + stability) ** alpha
        width = c / (k + 1) ** gamma
        delta = rng.choice([-1.0, 1.0], size=theta.size)

        plus = theta + width * delta
        minus = theta - width * delta
        value_plus = objective(plus)
        value_minus = objective(minus)
        for candidate, value in ((plus, value_plus), (minus, value_minus)):
            if value < best_value:
                best_theta, best_value = candidate, value

        # delta is +-1, so dividing by it is multiplying by it
        theta = theta - gain * (value_plus - value_minus) / (2.0 * width) * delta
        trace.append(best_value)

    return VqeRun(
        theta=best_theta, expectation=best_value, trace=tuple(trace), evaluations=evaluations
    )


def optimize_vqe(inner: IsingProblem, spec: VqeSpec, seed: int) -> VqeRun:
    """Run SPSA on the ansatz parameters and return the best-seen point."""
    spec.validate()
    diag = hamiltonian_diagonal(inner)
    return _optimize(diag, inner.n, spec, np.random.default_rng(as_seed(seed)))


def solve_vqe(inner: IsingProblem, spec: VqeSpec, seed: int) -> SolveOutcome:
    """
    Minimize ``inner`` with statevector VQE.

    Parameters start uniform on [-0.1, 0.1] and are tuned by SPSA with gains
    a_k = a / (k+1+A)**alpha and c_k = c / (k+1)**gamma. The best-seen state
    is then sampled ``spec.shots`` times and the lowest-energy sampled basis
    state is returned (the most probable one when shots is 0).
    ``evaluations`` counts statevector preparations.

    Raises:
        SubproblemTooLargeError: If the problem exceeds VQE_LIMIT variables
        ValueError: If the spec is invalid
    """
    spec.validate()
    m = inner.n
    diag = hamiltonian_diagonal(inner)
    rng = np.random.default_rng(as_seed(seed))
    run = _optimize(diag, m, spec, rng)

    probabilities = ansatz_state(run.theta, m, spec.layers).probabilities()
    probabilities = probabilities / probabilities.sum()
    if spec.shots > 0:
        sampled = np.unique(rng.choice(probabilities.size, size=spec.shots, p=probabilities))
        z = int(sampled[np.argmin(diag[sampled])])
    else:
        z = int(np.argmax(probabilities))

    config = spins_of_index(z, m)
    return SolveOutcome(
        config=config, energy=energy(inner, config), evaluations=run.evaluations + 1
    )
