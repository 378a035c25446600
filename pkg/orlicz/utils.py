"""This module contains the utility functions used when reading and writing CSV artifacts."""

import csv
import io
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Sequence, Tuple, Union

PathLike = Union[str, os.PathLike]


def format_number(value: Any) -> str:
    """Formats a number for CSV output.

    Finite floats use the shortest round-tripping representation so that identical inputs give
    byte-identical files. Infinite values are written as the literal tokens ``inf`` and ``-inf``.

    Args:
        value (Any): number (or string) to be formatted

    Returns:
        str: the formatted value
    """
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)

    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def parse_number(token: str) -> float:
    """Parses a number written by :func:`format_number`.

    Args:
        token (str): CSV cell

    Returns:
        float: the parsed value

    Raises:
        ValueError: if the token is not a number
    """
    token = token.strip()
    if token in ("inf", "+inf"):
        return math.inf
    if token == "-inf":
        return -math.inf
    return float(token)


def metadata_line(meta: Mapping[str, Any]) -> str:
    """Returns the single ``#``-prefixed metadata line heading every CSV artifact.

    For example, ``{"seed": 7, "command": "spectrum"}`` becomes ``# seed=7 command=spectrum``.
    """
    items = " ".join(f"{k}={format_number(v)}" for k, v in meta.items())
    return f"# {items}".rstrip()


def csv_text(meta: Mapping[str, Any], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Renders a CSV document with a metadata line, a header row and data rows.

    Args:
        meta (Mapping[str, Any]): metadata for the leading ``#`` line
        header (Sequence[str]): column names
        rows (Iterable[Sequence[Any]]): data rows; numbers are passed through :func:`format_number`

    Returns:
        str: the CSV document (UTF-8 text, ``\\n`` line endings)
    """
    buffer = io.StringIO()
    buffer.write(metadata_line(meta) + "\n")

    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def read_csv_rows(text: str) -> Tuple[List[str], List[List[str]]]:
    """Reads a CSV document written by :func:`csv_text`.

    Lines starting with ``#`` are skipped.

    Returns:
        tuple[list[str], list[list[str]]]: the header row and the data rows
    """
    lines = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not lines:
        return [], []

    rows = list(csv.reader(lines))
    return [c.strip() for c in rows[0]], rows[1:]


def write_atomic(path: PathLike, text: str) -> Path:
    """Writes text to a file atomically by writing to a temporary file and renaming it.

    Args:
        path (str, os.PathLike): destination path; parent directories are created
        text (str): file contents

    Returns:
        Path: the destination path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as file:
            file.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
