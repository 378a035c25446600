"""Unit tests for the utils module"""

import math

import pytest

from orlicz.utils import (
    csv_text,
    format_number,
    metadata_line,
    parse_number,
    read_csv_rows,
    write_atomic,
)


@pytest.mark.parametrize(
    "value, expected",
    [
        (0.1, "0.1"),
        (2.0, "2.0"),
        (3, "3"),
        (True, "true"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (math.nan, "nan"),
        ("cycle-4", "cycle-4"),
    ],
)
def test_format_number(value, expected):
    """Tests that numbers are written in their shortest round-tripping form."""
    assert format_number(value) == expected


@pytest.mark.parametrize("token, expected", [("inf", math.inf), ("-inf", -math.inf), (" 0.5", 0.5)])
def test_parse_number(token, expected):
    """Tests that the infinite sentinel and plain floats are read back."""
    assert parse_number(token) == expected


def test_parse_number_invalid():
    """Tests that a non-numeric token raises a ValueError."""
    with pytest.raises(ValueError):
        parse_number("abc")


def test_metadata_line():
    """Tests the leading metadata line."""
    assert metadata_line({"seed": 7, "command": "spectrum"}) == "# seed=7 command=spectrum"
    assert metadata_line({"seed": ""}) == "# seed="


class TestCsv:
    """Tests for writing and reading CSV documents."""

    def test_csv_text(self):
        """Tests the metadata line, the header and the formatted rows."""
        text = csv_text({"seed": 1}, ("lambda", "F"), [(2.0, 0.5), (4.0, math.inf)])
        assert text == "# seed=1\nlambda,F\n2.0,0.5\n4.0,inf\n"

    def test_read_csv_rows(self):
        """Tests that comment lines are skipped."""
        header, rows = read_csv_rows("# seed=1\nlambda, F\n# note\n2.0,0.5\n\n4.0,0.75\n")
        assert header == ["lambda", "F"]
        assert rows == [["2.0", "0.5"], ["4.0", "0.75"]]

    def test_read_empty(self):
        """Tests that an empty document has no header and no rows."""
        assert read_csv_rows("# seed=1\n") == ([], [])


class TestWriteAtomic:
    """Tests for atomic file writes."""

    def test_creates_parents(self, tmp_path):
        """Tests that parent directories are created."""
        path = write_atomic(tmp_path / "a" / "b" / "out.csv", "x\n")
        assert path.read_text() == "x\n"

    def test_replaces_and_cleans_up(self, tmp_path):
        """Tests that existing files are replaced and no temporary file is left."""
        path = tmp_path / "out.csv"
        path.write_text("old\n")
        write_atomic(path, "new\n")

        assert path.read_text() == "new\n"
        assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
