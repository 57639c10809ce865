"""
Reading and writing Ising instance files.

Format (UTF-8, LF line endings)::

    # comment
    ising <n>
    h <i> <value>
    J <i> <j> <value>

The header must be the first non-comment line. ``h`` and ``J`` lines may follow
in any order, each entry at most once, with i < j for couplings. Omitted
entries are zero. The canonical writer emits the header, all n ``h`` lines in
ascending order and then the stored ``J`` lines in (i, j) order, every value
with 17 significant digits.
"""

import math
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from .ising import IsingProblem
from .utils import format_float


class InstanceFormatError(ValueError):
    """Malformed instance text; ``line`` is the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.reason = message


def _parse_index(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceFormatError(line, f"invalid index {token!r}")


def _parse_value(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InstanceFormatError(line, f"invalid value {token!r}")
    if not math.isfinite(value):
        raise InstanceFormatError(line, f"value must be finite, got {token!r}")
    return value


def read_instance(text: str) -> IsingProblem:
    """
    Parse instance text.

    Args:
        text: Instance file contents

    Returns:
        IsingProblem

    Raises:
        InstanceFormatError: On a malformed line, duplicate entry, index out of
            range, or a coupling line with i >= j
    """
    n: Optional[int] = None
    fields: Dict[int, float] = {}
    couplings: Dict[Tuple[int, int], float] = {}

    for number, raw in enumerate(text.split("\n"), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue

        keyword = tokens[0]
        if n is None:
            if keyword != "ising" or len(tokens) != 2:
                raise InstanceFormatError(number, "expected header 'ising <n>'")
            n = _parse_index(tokens[1], number)
            if n < 1:
                raise InstanceFormatError(number, "problem size must be at least 1")
            continue

        if keyword == "h":
            if len(tokens) != 3:
                raise InstanceFormatError(number, "expected 'h <i> <value>'")
            i = _parse_index(tokens[1], number)
            if not 1 <= i <= n:
                raise InstanceFormatError(number, f"index {i} out of range 1..{n}")
            if i in fields:
                raise InstanceFormatError(number, f"duplicate field for variable {i}")
            fields[i] = _parse_value(tokens[2], number)
        elif keyword == "J":
            if len(tokens) != 4:
                raise InstanceFormatError(number, "expected 'J <i> <j> <value>'")
            i = _parse_index(tokens[1], number)
            j = _parse_index(tokens[2], number)
            if i >= j:
                raise InstanceFormatError(number, "coupling indices must satisfy i < j")
            if i < 1 or j > n:
                raise InstanceFormatError(number, f"coupling ({i}, {j}) out of range 1..{n}")
            if (i, j) in couplings:
                raise InstanceFormatError(number, f"duplicate coupling ({i}, {j})")
            couplings[(i, j)] = _parse_value(tokens[3], number)
        elif keyword == "ising":
            raise InstanceFormatError(number, "duplicate header")
        else:
            raise InstanceFormatError(number, f"unknown record {keyword!r}")

    if n is None:
        raise InstanceFormatError(1, "missing header 'ising <n>'")

    return IsingProblem(n, couplings, [fields.get(i, 0.0) for i in range(1, n + 1)])


def write_instance(problem: IsingProblem) -> str:
    """
    Serialize a problem in canonical form.

    Returns:
        Instance text ending with a newline
    """
    lines = [f"ising {problem.n}"]
    lines.extend(
        f"h {i} {format_float(value)}" for i, value in enumerate(problem.fields, 1)
    )
    lines.extend(
        f"J {i} {j} {format_float(value)}" for (i, j), value in problem.couplings.items()
    )
    return "\n".join(lines) + "\n"


def load_instance(path: Union[str, Path]) -> IsingProblem:
    """Read an instance file."""
    return read_instance(Path(path).read_text(encoding="utf-8"))


def save_instance(problem: IsingProblem, path: Union[str, Path]) -> None:
    """Write an instance file in canonical form."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="\n") as f:
        f.write(write_instance(problem))
