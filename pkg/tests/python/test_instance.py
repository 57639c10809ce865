"""
Tests for the instance file format.
"""

import pytest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src/python'))

from pqlstools.ising import IsingProblem, generate_instance
from pqlstools.instance import (
    InstanceFormatError,
    load_instance,
    read_instance,
    save_instance,
    write_instance,
)


class TestReadInstance:
    """Test parsing instance text."""

    def test_two_spin(self):
        """Test the two-spin example."""
        problem = read_instance("ising 2\nh 1 0.0\nh 2 0.0\nJ 1 2 1.0")
        assert problem == IsingProblem(2, {(1, 2): 1.0}, [0.0, 0.0])

    def test_comments_and_blank_lines(self):
        """Test comments and blank lines are skipped."""
        text = "# generated\n\nising 3  # three spins\nJ 2 3 -0.5\n\nh 3 0.25\n"
        problem = read_instance(text)
        assert problem.n == 3
        assert dict(problem.couplings) == {(2, 3): -0.5}
        assert problem.fields.tolist() == [0.0, 0.0, 0.25]

    def test_reversed_coupling(self):
        """Test i >= j in a coupling line."""
        with pytest.raises(InstanceFormatError, match="coupling indices must satisfy i < j"):
            read_instance("ising 2\nJ 2 1 1.0\n")

    def test_error_line_number(self):
        """Test errors report their 1-based line."""
        with pytest.raises(InstanceFormatError) as excinfo:
            read_instance("ising 2\nh 1 0.5\nJ 1 3 1.0\n")
        assert excinfo.value.line == 3
        assert str(excinfo.value).startswith("line 3: ")

    @pytest.mark.parametrize("text,line", [
        ("ising 2\nh 1 0.5\nh 1 0.5\n", 3),
        ("ising 2\nJ 1 2 1.0\nJ 1 2 2.0\n", 3),
        ("ising 2\nh 3 1.0\n", 2),
        ("ising 2\nh 1 abc\n", 2),
        ("ising 2\nh 1 inf\n", 2),
        ("ising 2\nJ 1 2\n", 2),
        ("ising 2\nx 1 2\n", 2),
        ("ising 2\nising 2\n", 2),
        ("h 1 0.5\nising 2\n", 1),
        ("ising 0\n", 1),
        ("", 1),
    ])
    def test_malformed(self, text, line):
        """Test malformed records are rejected at the right line."""
        with pytest.raises(InstanceFormatError) as excinfo:
            read_instance(text)
        assert excinfo.value.line == line

    def test_is_value_error(self):
        """Test format errors are ValueErrors."""
        with pytest.raises(ValueError):
            read_instance("nonsense")


class TestWriteInstance:
    """Test canonical serialization."""

    def test_canonical_form(self):
        """Test header, fields and couplings order."""
        text = write_instance(IsingProblem(2, {(1, 2): 1.0}, [0.5, 0.0]))
        assert text == "ising 2\nh 1 0.5\nh 2 0\nJ 1 2 1\n"

    def test_round_trip(self):
        """Test random instances survive a write and read."""
        for seed in range(5):
            problem = generate_instance(9, seed)
            assert read_instance(write_instance(problem)) == problem

    def test_file_round_trip(self, tmp_path):
        """Test saving and loading through a file."""
        problem = generate_instance(6, 42)
        path = tmp_path / "nested" / "instance.txt"
        save_instance(problem, path)
        assert load_instance(path) == problem
        assert b"\r" not in path.read_bytes()
