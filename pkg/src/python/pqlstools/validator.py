"""
Validation of instance text and sweep result files.
"""

import csv
import math
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from .config import METHODS
from .experiment import RECORD_FIELDS
from .instance import InstanceFormatError, read_instance

POSITIVE_INT_FIELDS = ("n_p", "n_g", "branches", "unit_length", "generations", "instance")
FLOAT_FIELDS = ("best_energy", "baseline_energy", "approx_ratio")


def is_valid_instance_text(text: str) -> bool:
    """
    Check if text parses as an Ising instance.

    Args:
        text: Instance file contents

    Returns:
        True if valid
    """
    return validate_instance_text(text)[0]


def validate_instance_text(text: str) -> Tuple[bool, Optional[str]]:
    """
    Validate instance text with a detailed error message.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(text, str):
        return False, "Instance must be a string"
    try:
        read_instance(text)
        return True, None
    except InstanceFormatError as e:
        return False, str(e)


def validate_header(header: Sequence[str]) -> Tuple[bool, Optional[str]]:
    """
    Check that a results header lists exactly the record columns, in order.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if tuple(header) == RECORD_FIELDS:
        return True, None
    missing = [name for name in RECORD_FIELDS if name not in header]
    if missing:
        return False, f"Missing columns: {', '.join(missing)}"
    extra = [name for name in header if name not in RECORD_FIELDS]
    if extra:
        return False, f"Unexpected columns: {', '.join(extra)}"
    return False, "Columns are out of order"


def _parse_int(row: Mapping[str, str], name: str) -> int:
    try:
        return int(row[name])
    except (TypeError, ValueError):
        raise ValueError(f"'{name}' must be an integer, got {row[name]!r}")


def _parse_float(row: Mapping[str, str], name: str) -> float:
    try:
        value = float(row[name])
    except (TypeError, ValueError):
        raise ValueError(f"'{name}' must be a number, got {row[name]!r}")
    if not math.isfinite(value):
        raise ValueError(f"'{name}' must be finite")
    return value


def validate_record(row: Mapping[str, str]) -> Tuple[bool, Optional[str]]:
    """
    Validate one results row.

    Checks the coordinates and seeds, then, unless the row records an error,
    that energies are finite, the baseline is negative, the ratio equals
    best_energy / baseline_energy exactly, and the call count and wall time
    are integers.

    Args:
        row: Mapping of column name to text, as csv.DictReader yields

    Returns:
        Tuple of (is_valid, error_message)
    """
    missing = [name for name in RECORD_FIELDS if row.get(name) is None]
    if missing:
        return False, f"Missing fields: {', '.join(missing)}"
    if not row["experiment_id"]:
        return False, "experiment_id cannot be empty"
    if row["method"] not in METHODS:
        return False, f"Unknown method '{row['method']}'"

    try:
        for name in POSITIVE_INT_FIELDS:
            if _parse_int(row, name) < 1:
                return False, f"'{name}' must be at least 1"
        for name in ("vqe_iterations", "instance_seed", "master_seed", "run_seed"):
            if _parse_int(row, name) < 0:
                return False, f"'{name}' must be non-negative"

        if row["error"]:
            return True, None

        best, baseline, ratio = (_parse_float(row, name) for name in FLOAT_FIELDS)
        if not baseline < 0:
            return False, f"baseline_energy must be negative, got {row['baseline_energy']}"
        if ratio != best / baseline:
            return False, "approx_ratio does not equal best_energy / baseline_energy"
        if _parse_int(row, "subsolver_calls") < 1:
            return False, "'subsolver_calls' must be at least 1"
        if _parse_int(row, "wall_ms") < 0:
            return False, "'wall_ms' must be non-negative"
    except ValueError as e:
        return False, str(e)

    return True, None


def is_valid_record(row: Mapping[str, str]) -> bool:
    return validate_record(row)[0]


def validate_results_file(path: Union[str, Path]) -> List[Tuple[int, str]]:
    """
    Re-check an emitted results CSV.

    Args:
        path: CSV file

    Returns:
        List of (line number, message) problems; empty when the file is valid
    """
    problems: List[Tuple[int, str]] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            return [(1, "File is empty")]
        ok, message = validate_header(header)
        if not ok:
            return [(1, message)]
        for line, values in enumerate(reader, 2):
            if len(values) != len(header):
                problems.append((line, f"Expected {len(header)} fields, got {len(values)}"))
                continue
            ok, message = validate_record(dict(zip(header, values)))
            if not ok:
                problems.append((line, message))
    return problems
