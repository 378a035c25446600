"""This module contains the :class:`ComplexTransformer` class and the parser of complex files."""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import lark
from lark import v_args

from .complexes import AbelianCoverSpec, SimplicialComplex, build_complex
from .validator import ValidationError


@dataclass
class ComplexDocument:
    """Contents of a complex file.

    Args:
        simplices (dict[int, list[tuple[str, ...]]]): vertex tuples per degree
        labels (dict[int, tuple[int, ...]]): edge labels keyed by edge index
        lines (dict[tuple[int, int], int]): source line of every cell, keyed by ``(degree, index)``
    """

    simplices: Dict[int, List[Tuple[str, ...]]] = field(default_factory=dict)
    labels: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    lines: Dict[Tuple[int, int], int] = field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        """Returns the cover rank implied by the labels (0 without labels)."""
        lengths = {len(label) for label in self.labels.values()}
        if len(lengths) > 1:
            raise ValidationError(
                f"Labels have different lengths {sorted(lengths)}.", "Complex file"
            )
        return lengths.pop() if lengths else 0

    def complex(self, auto_complete: bool = False) -> SimplicialComplex:
        """Builds the simplicial complex described by the document.

        Raises:
            ValidationError: if a cell has the wrong number of vertices, with its source line
        """
        issues = []
        for k, cells in self.simplices.items():
            for index, cell in enumerate(cells):
                if len(cell) != k + 1:
                    line = self.lines.get((k, index), "?")
                    issues.append(f"line {line}: cell {' '.join(cell)} needs {k + 1} vertices.")
        if issues:
            raise ValidationError(issues, subject="Complex file")
        return build_complex(self.simplices, auto_complete=auto_complete)

    def cover(self, size: int, auto_complete: bool = False) -> AbelianCoverSpec:
        """Returns the abelian cover given by the document's labels and a quotient size."""
        return AbelianCoverSpec(self.complex(auto_complete), self.labels, self.rank, size)


class ComplexTransformer(lark.Transformer):
    """Transformer for processing the Lark parse tree of a complex file.

    All method names mirror the corresponding symbols from the grammar.
    """

    def __init__(self, *args, **kwargs):
        self._document = ComplexDocument()
        super().__init__(*args, **kwargs)

    def document(self, args):
        """Root of the tree containing all sections.

        Returns:
            ComplexDocument: document containing all parsed data
        """
        assert all(a is None for a in args)
        return self._document

    @v_args(inline=True)
    def degree_section(self, degree, *rows):
        """Cells of one degree. Replaces a previously parsed section of the same degree."""
        k = int(degree)
        if k in self._document.simplices:
            warnings.warn(f"Section [k={k}] already set. Replacing old value with new value.")

        self._document.simplices[k] = [cell for _, cell in rows]
        for index, (line, _) in enumerate(rows):
            self._document.lines[(k, index)] = line

    def labels_section(self, rows):
        """Edge labels. A label given twice for the same edge replaces the earlier one."""
        for edge, label in rows:
            if edge in self._document.labels:
                warnings.warn(
                    f"Label for edge {edge} already set. Replacing old value with new value."
                )
            self._document.labels[edge] = label

    def cell_row(self, vertices):
        """Ordered vertex tuple, together with its source line."""
        return vertices[0].line, tuple(str(v) for v in vertices)

    @v_args(inline=True)
    def label_row(self, edge, *entries):
        """Edge index followed by its translation label."""
        return int(edge), tuple(int(e) for e in entries)


def _read_lark_file() -> str:
    """Reads the contents of the complex-file Lark grammar."""
    path = Path(__file__).parent / "complex.lark"
    with path.open("r", encoding="utf-8") as file:
        return file.read()


@lru_cache()
def _get_parser(debug: bool = False):
    """Create parser from options.

    Args:
        debug (bool): if false lark rule collisions will not be given a warning

    Returns:
        a parsing function
    """
    parser = lark.Lark(
        grammar=_read_lark_file(),
        start="document",
        parser="lalr",
        lexer="contextual",
        debug=debug,
    )

    def _inner_complex_parser(text):
        """Parse a complex file.

        Args:
            text (str): contents of the file

        Returns:
            ComplexDocument: the parsed document
        """
        try:
            tree = parser.parse(text + "\n")
        except lark.exceptions.UnexpectedInput as exc:
            raise ValidationError(
                f"line {exc.line}, column {exc.column}: unexpected input.", "Complex file"
            ) from exc
        return ComplexTransformer().transform(tree)

    return _inner_complex_parser


def parse_complex(text: str, debug: bool = False) -> ComplexDocument:
    """Parses the text of a complex file.

    Args:
        text (str): sections ``[k=...]`` holding one ordered vertex tuple per line, and an optional
            ``[labels]`` section with lines ``edge-index m1 ... md``; ``#`` starts a comment
        debug (bool): whether lark reports grammar diagnostics

    Returns:
        ComplexDocument: the parsed document
    """
    return _get_parser(debug)(text)


def load_complex(
    path: Union[str, os.PathLike], size: Optional[int] = None, auto_complete: bool = False
):
    """Reads a complex file.

    Args:
        path (str, os.PathLike): path of the file
        size (int): quotient size; when given an :class:`AbelianCoverSpec` is returned
        auto_complete (bool): whether missing faces are added

    Returns:
        SimplicialComplex, AbelianCoverSpec: the complex, or its cover when ``size`` is given
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"file '{path}' does not exist.", "Complex file")

    document = parse_complex(path.read_text(encoding="utf-8"))
    if size is None:
        return document.complex(auto_complete)
    return document.cover(size, auto_complete)
