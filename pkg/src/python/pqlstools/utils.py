"""
Shared helpers: seed mixing, float formatting, worker resolution and logging setup.
"""

import logging
import os
import sys
from typing import Optional

MASK64 = (1 << 64) - 1

# Odd multipliers used to spread generation and branch indices before mixing.
GENERATION_MULTIPLIER = 0x9E3779B97F4A7C15
BRANCH_MULTIPLIER = 0xC2B2AE3D27D4EB4F

WORKERS_ENV = "PQLS_WORKERS"


def mix64(value: int) -> int:
    """
    Apply a 64-bit finalizer-style avalanche mix.

    Args:
        value: Any integer; only the low 64 bits are used

    Returns:
        Mixed unsigned 64-bit integer
    """
    x = value & MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def derive_seed(master_seed: int, generation_index: int, branch_index: int) -> int:
    """
    Derive the seed of one branch stream from the master seed.

    The value is mix64(master ^ g * GENERATION_MULTIPLIER ^ b * BRANCH_MULTIPLIER)
    with every product reduced modulo 2**64. Index 0 is reserved for the
    initial-configuration stream.

    Args:
        master_seed: Master seed (negative values are taken modulo 2**64)
        generation_index: Generation index, >= 0
        branch_index: Branch index, >= 0

    Returns:
        Unsigned 64-bit seed

    Raises:
        ValueError: If an index is negative
    """
    if generation_index < 0 or branch_index < 0:
        raise ValueError("Generation and branch indices must be non-negative")

    spread_g = (generation_index * GENERATION_MULTIPLIER) & MASK64
    spread_b = (branch_index * BRANCH_MULTIPLIER) & MASK64
    return mix64((master_seed & MASK64) ^ spread_g ^ spread_b)


def as_seed(seed: int) -> int:
    """Reduce any integer seed to the unsigned 64-bit range numpy accepts."""
    return int(seed) & MASK64


def format_float(value: float) -> str:
    """
    Format a float with 17 significant digits (round-trips float64 exactly).

    Args:
        value: Value to format

    Returns:
        Canonical text form
    """
    return format(float(value), ".17g")


def resolve_workers(requested: Optional[int] = None, default: Optional[int] = None) -> int:
    """
    Resolve the concurrency degree.

    A positive ``requested`` wins; otherwise the PQLS_WORKERS environment
    variable; otherwise ``default``; otherwise the CPU count.

    Args:
        requested: Explicit worker count (0 or None means "not set")
        default: Fallback when neither flag nor environment is set

    Returns:
        Worker count >= 1

    Raises:
        ValueError: If PQLS_WORKERS is not a positive integer
    """
    if requested is not None and requested > 0:
        return requested

    env_value = os.environ.get(WORKERS_ENV)
    if env_value:
        try:
            workers = int(env_value)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {env_value!r}")
        if workers < 1:
            raise ValueError(f"{WORKERS_ENV} must be at least 1")
        return workers

    if default is not None:
        return default
    return os.cpu_count() or 1


def resolve_log_level(level_name: str) -> int:
    """
    Convert a level name such as "info" to its logging constant.

    Raises:
        ValueError: If the name is not a logging level
    """
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"Unknown log level '{level_name}'")
    return level


def configure_logging(level_name: str = "WARNING") -> None:
    """
    Send package logs to stderr at the given level.

    Args:
        level_name: Logging level name
    """
    logging.basicConfig(
        level=resolve_log_level(level_name),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
