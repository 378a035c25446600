"""This module contains finite simplicial complexes, their coboundary operators and abelian covers
realized through finite quotients and twisted character blocks."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse

from .monocalc import StepFunction
from .spectral_ops import DENSE_CAP, BlockFamily, OperatorInstance, _eigh
from .validator import NumericalError, ValidationError

logger = logging.getLogger(__name__)

SPECTRUM_CHECK_LIMIT = 512
"""int: Largest quotient dimension on which block spectra are compared with the quotient."""

Vertex = Hashable
Cell = Tuple[Vertex, ...]
Face = Tuple[int, int]
Simplices = Union[Mapping[int, Sequence[Sequence[Vertex]]], Sequence[Sequence[Sequence[Vertex]]]]


def _parity(source: Sequence[Vertex], target: Sequence[Vertex]) -> int:
    """Returns the sign of the permutation mapping ``source`` onto ``target``."""
    positions = [list(source).index(v) for v in target]
    inversions = sum(
        1
        for i, first in enumerate(positions)
        for second in positions[i + 1 :]
        if first > second
    )
    return -1 if inversions % 2 else 1


class SimplicialComplex:
    """Finite complex of oriented cells with signed incidences between consecutive degrees.

    Degree-1 cells may be loops or parallel edges; higher cells have distinct vertices. Use
    :func:`build_complex` to create a complex from vertex tuples.

    Args:
        cells (Sequence[Sequence[tuple]]): ordered vertex tuples per degree
        faces (Sequence[Sequence[Sequence[tuple[int, int]]]]): for every degree ``k >= 1`` and
            every cell, its ``(face index, sign)`` pairs in degree ``k - 1``; ``faces[0]`` is empty

    Raises:
        ValidationError: if a face index is out of range or ``d_{k+1} d_k != 0``
    """

    def __init__(self, cells: Sequence[Sequence[Cell]], faces: Sequence[Sequence[Sequence[Face]]]):
        self._cells = [list(c) for c in cells]
        self._faces = [[list(f) for f in per_degree] for per_degree in faces]

        issues = []
        for k in range(1, len(self._cells)):
            count = len(self._cells[k - 1])
            if len(self._faces[k]) != len(self._cells[k]):
                issues.append(f"Degree {k} has {len(self._cells[k])} cells but face lists differ.")
            elif any(i < 0 or i >= count for f in self._faces[k] for i, _ in f):
                issues.append(f"Degree {k} refers to a missing face.")
        if issues:
            raise ValidationError(issues, subject="Simplicial complex")

        self._coboundaries = [self._incidence(k) for k in range(len(self._cells))]
        for k in range(len(self._cells) - 1):
            product = self._coboundaries[k + 1] @ self._coboundaries[k]
            if product.count_nonzero():
                raise ValidationError(
                    f"d_{k + 1} d_{k} does not vanish; orientations are inconsistent.",
                    "Simplicial complex",
                )

    def __repr__(self) -> str:
        return f"<SimplicialComplex: counts={self.counts}>"

    def _incidence(self, k: int) -> scipy.sparse.csr_matrix:
        rows, cols, signs = [], [], []
        if k + 1 < len(self._cells):
            for row, faces in enumerate(self._faces[k + 1]):
                for col, sign in faces:
                    rows.append(row)
                    cols.append(col)
                    signs.append(sign)
        shape = (self.count(k + 1), self.count(k))
        matrix = scipy.sparse.coo_matrix((signs, (rows, cols)), shape=shape, dtype=np.int64)
        # duplicate (row, col) pairs are summed, so a loop edge has a zero row
        return matrix.tocsr()

    @property
    def counts(self) -> List[int]:
        """Returns the number of cells per degree."""
        return [len(c) for c in self._cells]

    @property
    def top_degree(self) -> int:
        """Returns the largest degree holding cells."""
        return len(self._cells) - 1

    def count(self, k: int) -> int:
        """Returns the number of cells of degree ``k`` (0 beyond the top degree)."""
        return len(self._cells[k]) if 0 <= k < len(self._cells) else 0

    def cells(self, k: int) -> List[Cell]:
        """Returns the vertex tuples of the cells of degree ``k``."""
        return list(self._cells[k]) if 0 <= k < len(self._cells) else []

    def faces(self, k: int) -> List[List[Face]]:
        """Returns the ``(face index, sign)`` pairs of every cell of degree ``k >= 1``."""
        return [list(f) for f in self._faces[k]] if 1 <= k < len(self._cells) else []

    def coboundary(self, k: int) -> scipy.sparse.csr_matrix:
        """Returns the integer coboundary ``d_k`` of shape ``(#K_{k+1}, #K_k)``."""
        if not 0 <= k < len(self._cells):
            raise ValidationError(
                f"Degree {k} is outside [0, {self.top_degree}].", "Complex degree"
            )
        return self._coboundaries[k]

    def hodge(self, k: int) -> scipy.sparse.csr_matrix:
        """Returns the Hodge operator ``d_kᵀ d_k``."""
        d = self.coboundary(k).astype(float)
        return (d.T @ d).tocsr()


def _normalize(simplices: Simplices) -> List[List[Cell]]:
    if isinstance(simplices, Mapping):
        top = max(simplices, default=-1)
        if any(k < 0 for k in simplices):
            raise ValidationError("Degrees must be nonnegative.", "Simplicial complex")
        return [[tuple(c) for c in simplices.get(k, ())] for k in range(top + 1)]
    return [[tuple(c) for c in per_degree] for per_degree in simplices]


def build_complex(simplices: Simplices, auto_complete: bool = False) -> SimplicialComplex:
    """Builds a simplicial complex from ordered vertex tuples.

    The sign of the face obtained by deleting the ``i``-th vertex is ``(-1)^i`` times the parity
    of the stored order of that face; edge ``(u, v)`` therefore acts as ``f(v) - f(u)``.

    Args:
        simplices (Mapping[int, Sequence[tuple]], Sequence[Sequence[tuple]]): vertex tuples per
            degree; degree-``k`` tuples have ``k + 1`` entries
        auto_complete (bool): whether missing faces are added instead of rejected

    Returns:
        SimplicialComplex: the complex

    Raises:
        ValidationError: if a tuple has the wrong length, repeats a vertex outside degree 1, lacks
            a face or has an ambiguous face
    """
    cells = _normalize(simplices)
    issues = []
    for k, per_degree in enumerate(cells):
        for cell in per_degree:
            if len(cell) != k + 1:
                issues.append(f"Cell {cell} in degree {k} must have {k + 1} vertices.")
            elif k != 1 and len(set(cell)) != len(cell):
                issues.append(f"Cell {cell} in degree {k} repeats a vertex.")
    if len(set(cells[0] if cells else [])) != len(cells[0] if cells else []):
        issues.append("Vertices must be unique.")
    if issues:
        raise ValidationError(issues, subject="Simplicial complex")

    if auto_complete:
        for k in range(len(cells) - 1, 0, -1):
            known = {frozenset(c) for c in cells[k - 1]}
            for cell in cells[k]:
                for i in range(len(cell)):
                    face = cell[:i] + cell[i + 1 :]
                    if frozenset(face) not in known:
                        known.add(frozenset(face))
                        cells[k - 1].append(face)
                        logger.debug("Added missing face %s to degree %d.", face, k - 1)

    faces: List[List[List[Face]]] = [[]]
    for k in range(1, len(cells)):
        lookup: Dict[frozenset, List[int]] = {}
        for index, face in enumerate(cells[k - 1]):
            lookup.setdefault(frozenset(face), []).append(index)

        per_degree = []
        for cell in cells[k]:
            cell_faces = []
            for i in range(len(cell)):
                deleted = cell[:i] + cell[i + 1 :]
                matches = lookup.get(frozenset(deleted), [])
                if not matches:
                    issues.append(f"Face {deleted} of cell {cell} is missing.")
                elif len(matches) > 1:
                    issues.append(f"Face {deleted} of cell {cell} is ambiguous.")
                else:
                    stored = cells[k - 1][matches[0]]
                    sign = (-1) ** i * _parity(stored, deleted)
                    cell_faces.append((matches[0], sign))
            per_degree.append(cell_faces)
        faces.append(per_degree)
    if issues:
        raise ValidationError(issues, subject="Simplicial complex")

    return SimplicialComplex(cells, faces)


class AbelianCoverSpec:
    """ℤᵈ-cover of a base complex given by translation labels on its edges, together with the
    size ``N`` of the finite quotient ``(ℤ/Nℤ)ᵈ``.

    The cover joins vertex ``(u, g)`` to ``(v, g + m_e)`` for every edge ``e = (u, v)`` with label
    ``m_e``; traversing an edge backwards translates by ``-m_e``.

    Args:
        base (SimplicialComplex): the base complex
        labels (Mapping[int, Sequence[int]]): label of each edge index; unlisted edges get zero
        rank (int): cover rank ``d``
        size (int): quotient size ``N``

    Raises:
        ValidationError: if labels have the wrong length, refer to missing edges, ``N < 2`` or the
            labels are not a cocycle on the higher cells
    """

    def __init__(
        self,
        base: SimplicialComplex,
        labels: Mapping[int, Sequence[int]],
        rank: int,
        size: int,
    ) -> None:
        issues = []
        if rank < 0:
            issues.append(f"Cover rank {rank} must be nonnegative.")
        if size < 2:
            issues.append(f"Quotient size {size} must be at least 2.")
        edges = base.count(1)
        table = np.zeros((edges, max(rank, 0)), dtype=np.int64)
        for edge, label in labels.items():
            if not 0 <= edge < edges:
                issues.append(f"Label refers to missing edge {edge}.")
            elif len(label) != rank:
                issues.append(f"Label of edge {edge} has {len(label)} entries, expected {rank}.")
            else:
                table[edge] = label
        if issues:
            raise ValidationError(issues, subject="Cover")

        self._base = base
        self._labels = table
        self._rank = rank
        self._size = size
        self._vertex_offsets: List[List[Dict[Vertex, np.ndarray]]] = []
        self._face_offsets: List[List[List[np.ndarray]]] = []
        self._compute_offsets()

    def __repr__(self) -> str:
        return f"<AbelianCoverSpec: counts={self._base.counts}, rank={self._rank}, N={self._size}>"

    def _compute_offsets(self) -> None:
        base, zero = self._base, np.zeros(self._rank, dtype=np.int64)
        self._vertex_offsets = [[{c[0]: zero} for c in base.cells(0)]]
        self._face_offsets = [[[] for _ in base.cells(0)]]
        if base.top_degree < 1:
            return

        edge_vertices, edge_faces = [], []
        for cell, label in zip(base.cells(1), self._labels):
            u, v = cell
            edge_vertices.append({u: zero, v: label} if u != v else {u: zero})
            # face 0 deletes u and starts at v; face 1 deletes v and starts at u
            edge_faces.append([label, zero])
        self._vertex_offsets.append(edge_vertices)
        self._face_offsets.append(edge_faces)

        issues = []
        for k in range(2, base.top_degree + 1):
            per_vertices, per_faces = [], []
            lower_cells, lower = base.cells(k - 1), self._vertex_offsets[k - 1]
            for cell, faces in zip(base.cells(k), base.faces(k)):
                last, _ = faces[-1]
                offsets = {w: lower[last][w] - lower[last][cell[0]] for w in lower_cells[last]}
                second, _ = faces[1]
                offsets[cell[-1]] = lower[second][cell[-1]] - lower[second][cell[0]]

                cell_faces = []
                for index, _ in faces:
                    start = offsets[lower_cells[index][0]]
                    if any(
                        np.any(offsets[w] - start != lower[index][w]) for w in lower_cells[index]
                    ):
                        issues.append(f"Labels are not a cocycle on cell {cell}.")
                        break
                    cell_faces.append(start)
                per_vertices.append(offsets)
                per_faces.append(cell_faces)
            self._vertex_offsets.append(per_vertices)
            self._face_offsets.append(per_faces)
        if issues:
            raise ValidationError(issues, subject="Cover")

    @property
    def base(self) -> SimplicialComplex:
        """Returns the base complex."""
        return self._base

    @property
    def labels(self) -> np.ndarray:
        """Returns the edge labels as an integer array of shape ``(#edges, d)``."""
        return self._labels.copy()

    @property
    def rank(self) -> int:
        """Returns the cover rank ``d``."""
        return self._rank

    @property
    def size(self) -> int:
        """Returns the quotient size ``N``."""
        return self._size

    @property
    def group_size(self) -> int:
        """Returns ``N^d``."""
        return self._size**self._rank

    def label(self, edge: int, reverse: bool = False) -> np.ndarray:
        """Returns the translation along an edge, negated when traversed backwards."""
        label = self._labels[edge]
        return -label if reverse else label.copy()

    def vertex_offsets(self, k: int) -> List[Dict[Vertex, np.ndarray]]:
        """Returns, per cell of degree ``k``, the translation of each vertex relative to the first
        one."""
        return self._vertex_offsets[k]

    def face_offsets(self, k: int) -> List[List[np.ndarray]]:
        """Returns, per cell of degree ``k``, the translation of the first vertex of each face."""
        return self._face_offsets[k]

    def characters(self) -> List[Tuple[int, ...]]:
        """Returns the characters θ of ``(ℤ/Nℤ)ᵈ`` in lexicographic order."""
        return list(np.ndindex(*(self._size,) * self._rank))

    def with_size(self, size: int) -> AbelianCoverSpec:
        """Returns the same cover with another quotient size."""
        labels = {e: tuple(int(x) for x in row) for e, row in enumerate(self._labels)}
        return AbelianCoverSpec(self._base, labels, self._rank, size)


def torus_cover(d: int, size: int) -> AbelianCoverSpec:
    """Returns the bouquet of ``d`` loops labelled by the unit vectors; its quotient is the
    discrete torus ``(ℤ/Nℤ)ᵈ``."""
    base = build_complex([[("v",)], [("v", "v")] * d])
    labels = {j: tuple(int(i == j) for i in range(d)) for j in range(d)}
    return AbelianCoverSpec(base, labels, d, size)


def quotient_complex(spec: AbelianCoverSpec) -> SimplicialComplex:
    """Builds the finite quotient of the cover: cells ``K_k × (ℤ/Nℤ)ᵈ`` with index
    ``flat(g) * #K_k + σ`` and incidences shifted by the edge labels."""
    base, size, rank = spec.base, spec.size, spec.rank
    group = [np.array(g, dtype=np.int64) for g in spec.characters()]
    shape = (size,) * rank

    def flat(g: np.ndarray) -> int:
        return int(np.ravel_multi_index(tuple(np.mod(g, size)), shape)) if rank else 0

    cells: List[List[Cell]] = []
    faces: List[List[List[Face]]] = []
    for k in range(base.top_degree + 1):
        lower = base.count(k - 1)
        base_cells = base.cells(k)
        base_faces = base.faces(k) if k else [[] for _ in base_cells]
        offsets = spec.face_offsets(k)
        per_cells, per_faces = [], []
        for g in group:
            for sigma, cell in enumerate(base_cells):
                if k == 1:
                    start, end = cell
                    head = (start, tuple(np.mod(g, size)))
                    tail = (end, tuple(np.mod(g + spec.label(sigma), size)))
                    per_cells.append((head, tail))
                else:
                    shifts = spec.vertex_offsets(k)[sigma]
                    per_cells.append(tuple((w, tuple(np.mod(g + shifts[w], size))) for w in cell))
                per_faces.append(
                    [
                        (flat(g + off) * lower + tau, sign)
                        for (tau, sign), off in zip(base_faces[sigma], offsets[sigma])
                    ]
                )
        cells.append(per_cells)
        faces.append(per_faces)

    quotient = SimplicialComplex(cells, faces)
    logger.debug("Built quotient complex with counts %s.", quotient.counts)
    return quotient


def coboundary_block(spec: AbelianCoverSpec, k: int, theta: Sequence[int]) -> np.ndarray:
    """Returns the twisted coboundary ``d_k(θ)`` with entries ``s · exp(2πi⟨m, θ⟩/N)``."""
    base = spec.base
    block = np.zeros((base.count(k + 1), base.count(k)), dtype=complex)
    if k + 1 > base.top_degree:
        return block

    theta = np.asarray(theta, dtype=float)
    for sigma, (faces, offsets) in enumerate(zip(base.faces(k + 1), spec.face_offsets(k + 1))):
        for (tau, sign), off in zip(faces, offsets):
            phase = 2.0 * math.pi * float(np.dot(off, theta)) / spec.size if spec.rank else 0.0
            block[sigma, tau] += sign * complex(math.cos(phase), math.sin(phase))
    return block


def twisted_blocks(
    spec: AbelianCoverSpec, k: int, verify: bool = True, jobs: int = 1
) -> BlockFamily:
    """Returns the family of Hermitian blocks ``d_k(θ)* d_k(θ)``, one per character θ.

    Args:
        spec (AbelianCoverSpec): the cover
        k (int): degree
        verify (bool): whether to check ``d_{k+1}(θ) d_k(θ) = 0`` per block and, for quotients of
            dimension at most :data:`SPECTRUM_CHECK_LIMIT`, that the block spectra reproduce the
            quotient spectrum
        jobs (int): worker threads for the spectrum comparison

    Raises:
        ValidationError: if the degree is out of range
        NumericalError: if a verification fails
    """
    if not 0 <= k <= spec.base.top_degree:
        raise ValidationError(
            f"Degree {k} is outside [0, {spec.base.top_degree}].", "Complex degree"
        )

    blocks = {}
    for theta in spec.characters():
        d = coboundary_block(spec, k, theta)
        if verify and k + 1 < spec.base.top_degree:
            composed = coboundary_block(spec, k + 1, theta) @ d
            if composed.size and np.max(np.abs(composed)) > 1e-12:
                raise NumericalError(f"Twisted coboundaries do not compose to zero at θ={theta}.")
        blocks[theta] = d.conj().T @ d
    family = BlockFamily(blocks, name=f"hodge-{k}-N{spec.size}")

    dimension = spec.group_size * spec.base.count(k)
    if verify and dimension <= SPECTRUM_CHECK_LIMIT:
        quotient = quotient_complex(spec).hodge(k).toarray()
        expected = np.sort(_eigh(quotient, eigvals_only=True))
        actual = family.eigenvalues(jobs)
        error = float(np.max(np.abs(expected - actual))) if dimension else 0.0
        if error > 1e-8 * max(1.0, float(np.max(np.abs(expected)))):
            raise NumericalError(f"Block spectra differ from the quotient spectrum by {error:.3e}.")
    return family


def hodge_density(
    spec: AbelianCoverSpec, k: int, jobs: int = 1, verify: bool = True
) -> StepFunction:
    """Returns the normalized spectral density of ``d_k* d_k`` on ``(ker d_k)^⊥``.

    Kernel eigenvalues are discarded blockwise and every remaining eigenvalue carries the weight
    ``1 / N^d``.
    """
    family = twisted_blocks(spec, k, verify=verify, jobs=jobs)
    density = family.density(spec.group_size, jobs)
    logger.info(
        "Hodge density k=%d N=%d: %d atoms, mass %s", k, spec.size, len(density), density.total_mass
    )
    return density


def cover_instance(
    spec: AbelianCoverSpec, k: int, name: Optional[str] = None, jobs: int = 1
) -> OperatorInstance:
    """Returns the invariant quotient Hodge operator ``d_kᵀ d_k`` with its block family.

    The dense matrix is only assembled when the quotient dimension is within :data:`DENSE_CAP`.
    """
    family = twisted_blocks(spec, k, jobs=jobs)
    dimension = spec.group_size * spec.base.count(k)
    matrix = quotient_complex(spec).hodge(k) if dimension <= DENSE_CAP else None
    return OperatorInstance(
        matrix,
        name=name or f"cover-k{k}-N{spec.size}",
        invariant=True,
        fiber=spec.base.count(k),
        blocks=family,
        dimension=dimension,
    )


@dataclass(frozen=True)
class SobolevBracket:
    """Two-sided bracket of the best constant ``C`` in ``‖α‖_p <= C ‖d_k α‖_2``.

    Args:
        p (float): exponent, ``inf`` allowed
        lower (float): largest sampled ratio
        upper (float): interpolation bound
        norm_2_2 (float): ``‖T‖_{2→2} = 1 / √λ_min⁺``
        norm_2_inf (float): ``‖T‖_{2→∞}``, the largest row norm of the inverse coboundary
        samples (int): number of sampled cochains
    """

    p: float
    lower: float
    upper: float
    norm_2_2: float
    norm_2_inf: float
    samples: int

    @property
    def ratio(self) -> float:
        """Returns ``upper / lower``."""
        return self.upper / self.lower if self.lower else math.inf


def _p_norm(values: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(values)))
    return float(np.sum(np.abs(values) ** p) ** (1.0 / p))


def sobolev_ratio(
    spec: AbelianCoverSpec,
    k: int,
    p: float,
    samples: int = 64,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> SobolevBracket:
    """Brackets the best constant of the Sobolev inequality ``‖α‖_p <= C ‖d_k α‖_2`` on the
    quotient, restricted to ``(ker d_k)^⊥``.

    The upper bound interpolates ``‖T‖_{2→2}^{2/p} ‖T‖_{2→∞}^{1-2/p}`` for the inverse coboundary
    ``T``; both norms are exact, computed per character block. The lower bound is the largest
    ratio over Gaussian cochains projected off the kernel, the columns of the pseudo-inverse of
    ``d_k* d_k`` and the lowest eigenmode.

    Args:
        spec (AbelianCoverSpec): the cover
        k (int): degree
        p (float): exponent ``>= 2``
        samples (int): number of Gaussian cochains
        seed (int): seed of the Gaussian sampler
        jobs (int): worker threads for the block decompositions

    Returns:
        SobolevBracket: the bracket

    Raises:
        ValidationError: if ``p < 2`` or the operator vanishes
    """
    if not p >= 2:
        raise ValidationError(f"Exponent {p} must be at least 2.", "Sobolev ratio")

    family = twisted_blocks(spec, k, verify=False, jobs=jobs)
    cells, size, rank = spec.base.count(k), spec.size, spec.rank
    shape = (size,) * rank + (cells,)
    axes = tuple(range(rank))

    diag = np.zeros(cells)
    lowest = (math.inf, None, None)
    kernels, pinvs = [], []
    for theta, block in zip(family.indices, family.blocks):
        values, vectors = _eigh(block)
        threshold = 1e-9 * max(1.0, float(np.max(np.abs(block)))) * cells
        positive = values > threshold
        q = vectors[:, positive]
        pinv = (q / values[positive]) @ q.conj().T
        pinvs.append(pinv)
        kernels.append(vectors[:, ~positive])
        diag += np.real(np.diag(pinv))
        if positive.any() and values[positive][0] < lowest[0]:
            lowest = (float(values[positive][0]), theta, vectors[:, positive][:, 0])
    if lowest[1] is None:
        raise ValidationError(
            f"d_{k} vanishes; the Sobolev constant is undefined.", "Sobolev ratio"
        )

    diag /= spec.group_size
    norm_2_inf = math.sqrt(float(np.max(diag)))
    norm_2_2 = 1.0 / math.sqrt(lowest[0])
    exponent = 0.0 if math.isinf(p) else 2.0 / p
    upper = norm_2_2**exponent * norm_2_inf ** (1.0 - exponent)

    def synthesize(coefficients: List[np.ndarray]) -> np.ndarray:
        spectrum = np.array(coefficients).reshape(shape)
        if rank:
            spectrum = np.fft.ifftn(spectrum, axes=axes)
        return np.real(spectrum).reshape(-1)

    candidates = []
    for tau in range(cells):
        unit = np.zeros(cells)
        unit[tau] = 1.0
        candidates.append(synthesize([pinv @ unit for pinv in pinvs]))

    _, theta, vector = lowest
    characters = np.array(spec.characters(), dtype=float).reshape(spec.group_size, rank)
    phases = np.exp(2j * math.pi * (characters @ np.array(theta, dtype=float)) / size)
    mode = np.multiply.outer(phases, vector).reshape(-1)
    candidates.append(mode.real if np.linalg.norm(mode.real) > 1e-8 else mode.imag)

    rng = np.random.default_rng(seed)
    for _ in range(samples):
        noise = rng.standard_normal(shape).astype(complex)
        spectrum = (np.fft.fftn(noise, axes=axes) if rank else noise).reshape(-1, cells)
        projected = [c - K @ (K.conj().T @ c) for c, K in zip(spectrum, kernels)]
        candidates.append(synthesize(projected))

    coboundary = quotient_complex(spec).coboundary(k).astype(float)
    lower = 0.0
    for alpha in candidates:
        energy = float(np.linalg.norm(coboundary @ alpha))
        if energy > 1e-12 * max(1.0, float(np.linalg.norm(alpha))):
            lower = max(lower, _p_norm(alpha, p) / energy)

    if lower > upper * (1.0 + 1e-9):
        raise NumericalError(f"Sampled Sobolev ratio {lower!r} exceeds its upper bound {upper!r}.")
    lower = min(lower, upper)
    logger.info("Sobolev bracket k=%d N=%d p=%s: [%s, %s]", k, size, p, lower, upper)
    return SobolevBracket(float(p), lower, upper, norm_2_2, norm_2_inf, samples)
