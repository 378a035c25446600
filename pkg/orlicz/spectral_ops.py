"""This module contains finite operator instances and their spectral calculus under the counting
measure: eigen-decompositions, spectral projectors, ultracontractive norms, normalized traces and
the spectral decay ``F`` of an instance."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse

from .monocalc import StepFunction, step_from_values
from .utils import parse_number, read_csv_rows
from .validator import ConvergenceError, NumericalError, ValidationError

logger = logging.getLogger(__name__)

DENSE_CAP = 4096
"""int: Largest dimension decomposed by the dense solver."""

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-9
KERNEL_FACTOR = 1e-9
RECONSTRUCTION_TOL = 1e-8
ORTHONORMALITY_TOL = 1e-9
CLUSTER_TOL = 1e-9
SNAP_DIGITS = 12

Index = Tuple[int, ...]
ArrayLike = Union[float, Sequence[float], np.ndarray]


def snap(value: float) -> float:
    """Rounds a value to 12 significant digits.

    Closed-form eigenvalues computed in floating point, such as ``2 - 2cos(π/2)``, are mapped back
    to their exact representation so that identical spectra give identical atoms.
    """
    return float(f"{value:.{SNAP_DIGITS}g}")


def cluster_values(values: ArrayLike, rtol: float = CLUSTER_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Groups sorted values whose consecutive gaps do not exceed ``rtol * max(1, max|v|)``.

    Returns:
        tuple[np.ndarray, np.ndarray]: snapped cluster representatives and multiplicities
    """
    values = np.sort(np.asarray(values, dtype=float).ravel())
    if not len(values):
        return np.zeros(0), np.zeros(0, dtype=int)

    tol = rtol * max(1.0, float(np.max(np.abs(values))))
    breaks = np.flatnonzero(np.diff(values) > tol) + 1
    groups = np.split(values, breaks)
    reps = np.array([snap(float(np.mean(g))) for g in groups])
    counts = np.array([len(g) for g in groups], dtype=int)
    return reps, counts


def _max_abs(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def _eigh(matrix: np.ndarray, eigvals_only: bool = False):
    """Symmetric/Hermitian eigensolver with a NumPy fallback."""
    try:
        return scipy.linalg.eigh(matrix, eigvals_only=eigvals_only)
    except (scipy.linalg.LinAlgError, ValueError):
        logger.warning("SciPy eigh failed on a %s matrix; retrying with NumPy.", matrix.shape)
        if eigvals_only:
            return np.linalg.eigvalsh(matrix)
        return np.linalg.eigh(matrix)


def _block_spectrum(block: np.ndarray) -> np.ndarray:
    return np.asarray(_eigh(block, eigvals_only=True), dtype=float)


class BlockFamily:
    """Family of small Hermitian blocks indexed by the characters of a finite abelian group.

    The spectrum of an invariant operator is the union of the block spectra, so the family gives
    the density of instances too large for the dense solver.

    Args:
        blocks (Mapping[tuple[int, ...], array]): square Hermitian blocks of equal size, keyed by
            character index
        name (str): label used in log messages

    Raises:
        ValidationError: if the blocks are empty, of different sizes or not Hermitian
    """

    def __init__(self, blocks: Mapping[Index, np.ndarray], name: str = "blocks") -> None:
        issues = []
        arrays = {tuple(k): np.atleast_2d(np.asarray(v)) for k, v in blocks.items()}
        if not arrays:
            issues.append("A block family needs at least one block.")
        shapes = {a.shape for a in arrays.values()}
        if len(shapes) > 1:
            issues.append(f"Blocks have different shapes: {sorted(shapes)}.")
        for index, block in arrays.items():
            if block.shape[0] != block.shape[1]:
                issues.append(f"Block {index} is not square.")
            elif _max_abs(block - block.conj().T) > SYMMETRY_TOL * max(1.0, _max_abs(block)):
                issues.append(f"Block {index} is not Hermitian.")
        if issues:
            raise ValidationError(issues, subject="Block family")

        self._indices = sorted(arrays)
        self._blocks = [arrays[k] for k in self._indices]
        self._name = name
        self._spectra: Optional[List[np.ndarray]] = None

    def __repr__(self) -> str:
        return f"<BlockFamily: name={self._name}, blocks={len(self)}, size={self.block_size}>"

    def __len__(self) -> int:
        return len(self._blocks)

    @property
    def indices(self) -> List[Index]:
        """Returns the character indices in lexicographic order."""
        return list(self._indices)

    @property
    def blocks(self) -> List[np.ndarray]:
        """Returns the blocks, ordered like :attr:`indices`."""
        return list(self._blocks)

    @property
    def block_size(self) -> int:
        """Returns the common size of the blocks."""
        return self._blocks[0].shape[0]

    @property
    def name(self) -> str:
        """Returns the label of the family."""
        return self._name

    def decompose(self, jobs: int = 1) -> List[np.ndarray]:
        """Returns the ascending eigenvalues of every block.

        Blocks are decomposed independently in a thread pool; the result is ordered like
        :attr:`indices` whatever the number of workers.

        Args:
            jobs (int): number of worker threads
        """
        if self._spectra is None:
            logger.debug("Decomposing %d blocks of %s (jobs=%d).", len(self), self._name, jobs)
            if jobs > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    self._spectra = list(pool.map(_block_spectrum, self._blocks))
            else:
                self._spectra = [_block_spectrum(b) for b in self._blocks]
        return list(self._spectra)

    def eigenvalues(self, jobs: int = 1) -> np.ndarray:
        """Returns the sorted multiset union of the block spectra."""
        return np.sort(np.concatenate(self.decompose(jobs)))

    def positive_eigenvalues(self, jobs: int = 1) -> np.ndarray:
        """Returns the block eigenvalues above each block's kernel threshold."""
        kept = []
        for block, spectrum in zip(self._blocks, self.decompose(jobs)):
            threshold = KERNEL_FACTOR * max(1.0, _max_abs(block)) * self.block_size
            kept.append(spectrum[spectrum > threshold])
        return np.sort(np.concatenate(kept))

    def density(self, group_size: Optional[int] = None, jobs: int = 1) -> StepFunction:
        """Returns the normalized eigenvalue count of the positive part of the spectrum.

        Args:
            group_size (int): normalization; defaults to the number of blocks
            jobs (int): number of worker threads

        Returns:
            StepFunction: atoms at the distinct positive eigenvalues with weights
            ``multiplicity / group_size``
        """
        group_size = len(self) if group_size is None else group_size
        reps, counts = cluster_values(self.positive_eigenvalues(jobs))
        return StepFunction(reps, counts / group_size) if len(reps) else StepFunction()


class OperatorInstance:
    """Finite symmetric positive semidefinite operator acting on functions on a finite set with
    the counting measure.

    Args:
        matrix (array, sparse matrix): symmetric real matrix; may be ``None`` when ``blocks`` is
            given and the instance is too large for the dense solver
        name (str): identifier used in reports
        invariant (bool): whether a transitive group action commutes with the operator
        fiber (int): fiber dimension ``n`` (1 for scalar instances)
        blocks (BlockFamily): optional character decomposition
        dimension (int): dimension, required when ``matrix`` is ``None``

    Raises:
        ValidationError: if the matrix is not square, finite and symmetric
    """

    def __init__(
        self,
        matrix: Union[None, np.ndarray, scipy.sparse.spmatrix],
        name: str = "instance",
        invariant: bool = False,
        fiber: int = 1,
        blocks: Optional[BlockFamily] = None,
        dimension: Optional[int] = None,
    ) -> None:
        if scipy.sparse.issparse(matrix):
            matrix = matrix.toarray()

        issues = []
        if matrix is not None:
            matrix = np.array(matrix, dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or not matrix.size:
                issues.append(f"Matrix of shape {matrix.shape} is not square.")
            elif not np.all(np.isfinite(matrix)):
                issues.append("Matrix entries must be finite.")
            elif _max_abs(matrix - matrix.T) > SYMMETRY_TOL * max(1.0, _max_abs(matrix)):
                issues.append("Matrix is not symmetric.")
            dimension = matrix.shape[0] if matrix.ndim == 2 else 0
        elif blocks is None or dimension is None:
            issues.append("Either a matrix or a block family with a dimension is required.")

        if fiber < 1 or (dimension and dimension % fiber):
            issues.append(f"Fiber dimension {fiber} does not divide the dimension {dimension}.")
        if blocks is not None and dimension and len(blocks) * blocks.block_size != dimension:
            issues.append("Block family size does not match the dimension.")
        if issues:
            raise ValidationError(issues, subject=f"Operator instance '{name}'")

        if matrix is not None:
            matrix.setflags(write=False)
        self._matrix = matrix
        self._name = name
        self._invariant = invariant
        self._fiber = fiber
        self._blocks = blocks
        self._dimension = int(dimension)

    def __repr__(self) -> str:
        return f"<OperatorInstance: name={self._name}, dimension={self._dimension}>"

    @property
    def matrix(self) -> Optional[np.ndarray]:
        """Returns the dense matrix, if any."""
        return self._matrix

    @property
    def name(self) -> str:
        """Returns the identifier of the instance."""
        return self._name

    @property
    def dimension(self) -> int:
        """Returns the number of points."""
        return self._dimension

    @property
    def invariant(self) -> bool:
        """Returns whether the instance is invariant under a transitive group action."""
        return self._invariant

    @property
    def fiber(self) -> int:
        """Returns the fiber dimension."""
        return self._fiber

    @property
    def group_size(self) -> int:
        """Returns the cardinality of the acting group, ``dimension / fiber``."""
        return self._dimension // self._fiber

    @property
    def blocks(self) -> Optional[BlockFamily]:
        """Returns the character decomposition, if any."""
        return self._blocks

    @property
    def norm(self) -> float:
        """Returns the largest entry magnitude of the matrix."""
        return _max_abs(self._matrix) if self._matrix is not None else 0.0


class SpectralDecomposition:
    """Eigen-decomposition ``A = QΛQᵀ`` with a kernel classification.

    Use :func:`decompose` to create instances.
    """

    def __init__(
        self, eigenvalues: np.ndarray, eigenvectors: np.ndarray, threshold: float, norm: float
    ) -> None:
        self._eigenvalues = eigenvalues
        self._eigenvectors = eigenvectors
        self._threshold = threshold
        self._norm = norm
        for array in (self._eigenvalues, self._eigenvectors):
            array.setflags(write=False)

    def __repr__(self) -> str:
        return (
            f"<SpectralDecomposition: dimension={len(self._eigenvalues)}, "
            f"kernel={int(self.kernel_mask.sum())}>"
        )

    @property
    def eigenvalues(self) -> np.ndarray:
        """Returns the eigenvalues in ascending order."""
        return self._eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        """Returns the orthonormal eigenvectors as columns."""
        return self._eigenvectors

    @property
    def threshold(self) -> float:
        """Returns the kernel threshold."""
        return self._threshold

    @property
    def norm(self) -> float:
        """Returns the largest entry magnitude of the decomposed matrix."""
        return self._norm

    @property
    def dimension(self) -> int:
        """Returns the dimension of the decomposed matrix."""
        return len(self._eigenvalues)

    @property
    def kernel_mask(self) -> np.ndarray:
        """Returns the mask of the eigenvalues classified as kernel."""
        return self._eigenvalues <= self._threshold

    @property
    def positive_mask(self) -> np.ndarray:
        """Returns the mask of the eigenvalues on the positive spectral part."""
        return ~self.kernel_mask

    @property
    def kernel_vectors(self) -> np.ndarray:
        """Returns an orthonormal basis of the kernel."""
        return self._eigenvectors[:, self.kernel_mask]

    @property
    def positive_eigenvalues(self) -> np.ndarray:
        """Returns the eigenvalues on the positive spectral part."""
        return self._eigenvalues[self.positive_mask]

    @property
    def max_eigenvalue(self) -> float:
        """Returns the largest eigenvalue (0 for the zero matrix)."""
        return float(max(self._eigenvalues[-1], 0.0))

    @property
    def cluster_tolerance(self) -> float:
        """Returns the absolute gap below which eigenvalues are treated as equal."""
        return CLUSTER_TOL * max(1.0, self.max_eigenvalue)

    def reconstruct(self) -> np.ndarray:
        """Returns ``QΛQᵀ``."""
        q = self._eigenvectors
        return (q * self._eigenvalues) @ q.T

    def spectral_sum(self, weights: np.ndarray) -> np.ndarray:
        """Returns ``Σ_i weights[i] q_i q_iᵀ`` over the positive spectral part."""
        mask = self.positive_mask
        q = self._eigenvectors[:, mask]
        return (q * weights) @ q.T


def decompose(
    instance: OperatorInstance, cap: int = DENSE_CAP, kernel_factor: float = KERNEL_FACTOR
) -> SpectralDecomposition:
    """Computes the eigen-decomposition of an instance with the dense symmetric solver.

    Args:
        instance (OperatorInstance): the instance
        cap (int): largest accepted dimension
        kernel_factor (float): eigenvalues below ``kernel_factor * ‖A‖_max * dimension`` are
            classified as kernel

    Returns:
        SpectralDecomposition: the decomposition

    Raises:
        ValidationError: if the instance has no dense matrix, exceeds the cap or is not positive
            semidefinite
        ConvergenceError: if the reconstruction or orthonormality checks fail
    """
    if instance.matrix is None:
        raise ValidationError("no dense matrix is available; use its block family.", instance.name)
    if instance.dimension > cap:
        raise ValidationError(
            f"dimension {instance.dimension} exceeds the dense cap {cap}.", instance.name
        )

    matrix = instance.matrix
    norm = instance.norm
    eigenvalues, eigenvectors = _eigh(matrix)
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    eigenvectors = np.array(eigenvectors, dtype=float)

    scale = max(1.0, norm)
    if eigenvalues[0] < -PSD_TOL * scale:
        raise ValidationError(
            f"smallest eigenvalue {eigenvalues[0]!r} is negative; the operator must be positive "
            "semidefinite.",
            f"Operator instance '{instance.name}'",
        )

    decomposition = SpectralDecomposition(
        eigenvalues, eigenvectors, kernel_factor * norm * instance.dimension, norm
    )
    residual = _max_abs(decomposition.reconstruct() - matrix)
    if residual > RECONSTRUCTION_TOL * scale:
        raise ConvergenceError(f"Reconstruction of '{instance.name}' failed", residual)

    orthogonality = _max_abs(eigenvectors.T @ eigenvectors - np.eye(instance.dimension))
    if orthogonality > ORTHONORMALITY_TOL:
        raise ConvergenceError(
            f"Eigenvectors of '{instance.name}' are not orthonormal", orthogonality
        )

    logger.debug(
        "Decomposed %s: dimension=%d, kernel=%d, residual=%.3e",
        instance.name,
        instance.dimension,
        int(decomposition.kernel_mask.sum()),
        residual,
    )
    return decomposition


def distinct_eigenvalues(decomposition: SpectralDecomposition) -> Tuple[np.ndarray, np.ndarray]:
    """Returns the distinct positive eigenvalues (snapped) and their multiplicities."""
    return cluster_values(decomposition.positive_eigenvalues)


def _selected(decomposition: SpectralDecomposition, lam: float) -> np.ndarray:
    return decomposition.positive_eigenvalues <= lam + decomposition.cluster_tolerance


def projector(decomposition: SpectralDecomposition, lam: float) -> np.ndarray:
    """Returns the spectral projector ``Π_λ`` onto the eigenvectors with ``0 < λ_i <= λ``."""
    return decomposition.spectral_sum(_selected(decomposition, lam).astype(float))


def ultra_norm(matrix: np.ndarray) -> float:
    """Returns ``‖P‖_{1,∞}`` under the counting measure, i.e. the largest entry magnitude."""
    return _max_abs(np.asarray(matrix))


def gamma_trace(matrix: np.ndarray, group_size: int) -> float:
    """Returns the normalized trace ``τ_Γ(P) = trace(P) / |Γ|``."""
    if group_size < 1:
        raise ValidationError(f"Group size {group_size} must be positive.", "Trace argument")
    return float(np.real(np.trace(matrix))) / group_size


def spectral_density(
    instance: OperatorInstance,
    decomposition: Optional[SpectralDecomposition] = None,
    jobs: int = 1,
) -> StepFunction:
    """Computes the spectral decay ``F`` of an instance.

    Invariant instances use the normalized eigenvalue count (through their block family when one
    is attached); other instances evaluate ``ultra_norm(Π_λ)`` at every distinct eigenvalue.

    Args:
        instance (OperatorInstance): the instance
        decomposition (SpectralDecomposition): a decomposition of the instance, computed if needed
        jobs (int): worker threads for block families

    Returns:
        StepFunction: the spectral decay

    Raises:
        NumericalError: if the projector path is not monotone
    """
    if instance.invariant and instance.blocks is not None and decomposition is None:
        return instance.blocks.density(instance.group_size, jobs)

    decomposition = decomposition or decompose(instance)
    reps, counts = distinct_eigenvalues(decomposition)
    if not len(reps):
        return StepFunction()

    if instance.invariant:
        return StepFunction(reps, counts / instance.group_size)

    vectors = decomposition.eigenvectors[:, decomposition.positive_mask]
    cumulative = np.zeros((instance.dimension, instance.dimension))
    values = np.zeros(len(reps))
    start = 0
    for i, count in enumerate(counts):
        q = vectors[:, start : start + count]
        cumulative += q @ q.T
        values[i] = ultra_norm(cumulative)
        start += count

    scale = max(1.0, float(values[-1]))
    drops = np.diff(values, prepend=0.0)
    if np.any(drops < -PSD_TOL * scale):
        raise NumericalError(
            f"Spectral decay of '{instance.name}' decreases by {-drops.min():.3e}; the spectral "
            "projectors are numerically damaged."
        )

    values = np.maximum.accumulate(values)
    jumps = np.diff(values, prepend=0.0)
    keep = jumps > 1e-12 * scale
    return step_from_values(reps[keep], values[keep])


def energy(instance: OperatorInstance, f: ArrayLike) -> float:
    """Returns the energy ``E(f) = ⟨Af, f⟩``.

    Raises:
        ValidationError: if the dimension of ``f`` does not match
        NumericalError: if the energy is negative beyond tolerance
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (instance.dimension,):
        raise ValidationError(
            f"State of shape {f.shape} does not match dimension {instance.dimension}.", "State"
        )

    value = float(f @ (instance.matrix @ f))
    if value < -PSD_TOL * max(1.0, instance.norm) * float(f @ f):
        raise NumericalError(f"Negative energy {value!r} on '{instance.name}'.")
    return max(value, 0.0)


def project_off_kernel(decomposition: SpectralDecomposition, f: ArrayLike) -> np.ndarray:
    """Returns ``f`` minus its orthogonal projection onto the kernel."""
    f = np.asarray(f, dtype=float)
    if f.shape != (decomposition.dimension,):
        raise ValidationError(
            f"State of shape {f.shape} does not match dimension {decomposition.dimension}.", "State"
        )
    kernel = decomposition.kernel_vectors
    return f - kernel @ (kernel.T @ f)


def resolvent_projector_norm(decomposition: SpectralDecomposition, lam: float) -> float:
    """Returns ``ultra_norm(A⁻¹Π_λ)`` with the pseudo-inverse on the positive part."""
    positive = decomposition.positive_eigenvalues
    return ultra_norm(decomposition.spectral_sum(_selected(decomposition, lam) / positive))


def heat_norms(decomposition: SpectralDecomposition, t: float) -> Tuple[float, float]:
    """Returns ``(ultra_norm(e^{-tA}Π_V), ultra_norm(A⁻¹e^{-tA}Π_V))`` for ``t > 0``."""
    if t <= 0:
        raise ValidationError(f"Heat time {t} must be positive.", "Heat argument")
    positive = decomposition.positive_eigenvalues
    decay = np.exp(-t * positive)
    return (
        ultra_norm(decomposition.spectral_sum(decay)),
        ultra_norm(decomposition.spectral_sum(decay / positive)),
    )


def cycle_laplacian(size: int) -> np.ndarray:
    """Returns the Laplacian ``2I - S - Sᵀ`` of the cycle with ``size`` vertices."""
    if size < 2:
        raise ValidationError(f"Cycle size {size} must be at least 2.", "Cycle")
    shift = np.roll(np.eye(size), 1, axis=1)
    return 2.0 * np.eye(size) - shift - shift.T


def torus_blocks(d: int, size: int) -> BlockFamily:
    """Returns the 1×1 character blocks ``Σ_j (2 - 2cos(2πθ_j/N))`` of the ℤᵈ torus Laplacian."""
    blocks = {}
    for theta in np.ndindex(*(size,) * d):
        value = sum(2.0 - 2.0 * math.cos(2.0 * math.pi * t / size) for t in theta)
        blocks[theta] = np.array([[value]])
    return BlockFamily(blocks, name=f"torus-{d}-{size}")


def torus_instance(d: int, size: int, name: Optional[str] = None) -> OperatorInstance:
    """Returns the invariant vertex Laplacian of the discrete torus ``(ℤ/Nℤ)ᵈ``.

    The dense matrix is only assembled when ``N^d`` is within :data:`DENSE_CAP`.
    """
    if d < 1:
        raise ValidationError(f"Torus dimension {d} must be positive.", "Torus")

    dimension = size**d
    matrix = None
    if dimension <= DENSE_CAP:
        cycle = scipy.sparse.csr_matrix(cycle_laplacian(size))
        identity = scipy.sparse.identity(size, format="csr")
        matrix = scipy.sparse.csr_matrix((dimension, dimension))
        for axis in range(d):
            factors = [cycle if j == axis else identity for j in range(d)]
            term = factors[0]
            for factor in factors[1:]:
                term = scipy.sparse.kron(term, factor, format="csr")
            matrix = matrix + term

    return OperatorInstance(
        matrix,
        name=name or (f"cycle-{size}" if d == 1 else f"torus-{d}-{size}"),
        invariant=True,
        blocks=torus_blocks(d, size),
        dimension=dimension,
    )


def cycle_instance(size: int, name: Optional[str] = None) -> OperatorInstance:
    """Returns the invariant Laplacian of the cycle ``C_N``."""
    return torus_instance(1, size, name=name)


def cayley_table_instance(
    table: Sequence[Sequence[int]], generators: Iterable[int], name: str = "cayley"
) -> OperatorInstance:
    """Returns the Laplacian of the Cayley graph of a finite group given by its multiplication
    table.

    The generating set is symmetrized by adding inverses; vertices ``x`` and ``x·s`` are joined
    for every generator ``s``.

    Args:
        table (Sequence[Sequence[int]]): ``table[a][b]`` is the index of ``a·b``
        generators (Iterable[int]): generator indices (the identity is ignored)
        name (str): identifier of the instance

    Raises:
        ValidationError: if the table is not a group table or a generator is out of range
    """
    table = np.asarray(table, dtype=int)
    order = len(table)
    issues = []
    if table.ndim != 2 or table.shape != (order, order) or not order:
        raise ValidationError("Multiplication table must be square.", "Cayley table")

    elements = np.arange(order)
    rows_ok = np.all(np.sort(table, axis=1) == elements)
    cols_ok = np.all(np.sort(table, axis=0) == elements[:, None])
    if not (rows_ok and cols_ok):
        issues.append("Every row and column must be a permutation of the elements.")
    elif np.any(table[table] != table[:, table]):
        # table[table][a, b, c] = (ab)c and table[:, table][a, b, c] = a(bc)
        issues.append("Multiplication is not associative.")
    generators = sorted(set(int(g) for g in generators))
    if any(g < 0 or g >= order for g in generators):
        issues.append(f"Generators {generators} must lie in [0, {order}).")
    if issues:
        raise ValidationError(issues, subject="Cayley table")

    identity = int(np.flatnonzero(np.all(table == elements, axis=1))[0])
    inverse = {a: int(np.flatnonzero(table[a] == identity)[0]) for a in range(order)}
    symmetric = sorted(set(generators) | {inverse[g] for g in generators} - {identity})

    matrix = np.zeros((order, order))
    for s in symmetric:
        matrix[elements, table[:, s]] -= 1.0
    matrix += len(symmetric) * np.eye(order)
    return OperatorInstance(matrix, name=name, invariant=True)


def random_psd_instance(
    dimension: int, rank: Optional[int] = None, seed: Optional[int] = None, name: str = "random"
) -> OperatorInstance:
    """Returns the non-invariant instance ``BBᵀ / dimension`` with a Gaussian ``B``."""
    rng = np.random.default_rng(seed)
    factor = rng.standard_normal((dimension, rank or dimension))
    matrix = factor @ factor.T / dimension
    return OperatorInstance((matrix + matrix.T) / 2, name=name, invariant=False)


def read_dense_matrix(text: str) -> np.ndarray:
    """Parses a dense matrix written one row per line with comma-separated entries."""
    lines = [l for l in text.splitlines() if l.strip() and not l.lstrip().startswith("#")]
    try:
        rows = [[parse_number(c) for c in line.split(",")] for line in lines]
    except ValueError as exc:
        raise ValidationError(str(exc), "Dense matrix") from exc

    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValidationError(f"Expected a square matrix, got {len(rows)} rows.", "Dense matrix")
    return np.array(rows)


def read_triplets(text: str, dimension: Optional[int] = None) -> np.ndarray:
    """Parses a symmetric matrix from ``i,j,value`` lines; the upper triangle suffices.

    Args:
        text (str): triplet lines; ``#`` lines and an optional ``i,j,value`` header are skipped
        dimension (int): matrix dimension; defaults to the largest index plus one

    Raises:
        ValidationError: if an entry is malformed or mirrored entries disagree
    """
    header, rows = read_csv_rows(text)
    if header and header[0] != "i":
        rows = [header] + rows

    entries = {}
    issues = []
    for number, row in enumerate(rows, start=1):
        try:
            i, j, value = int(row[0]), int(row[1]), parse_number(row[2])
        except (ValueError, IndexError):
            issues.append(f"Line {number}: expected 'i,j,value', got {','.join(row)!r}.")
            continue
        if i < 0 or j < 0:
            issues.append(f"Line {number}: negative index.")
            continue
        key = (min(i, j), max(i, j))
        if key in entries and entries[key] != value:
            issues.append(f"Line {number}: entry {key} conflicts with its mirror.")
        entries[key] = value
    if issues:
        raise ValidationError(issues, subject="Triplet matrix")

    size = dimension or (max((max(k) for k in entries), default=-1) + 1)
    matrix = np.zeros((size, size))
    for (i, j), value in entries.items():
        matrix[i, j] = matrix[j, i] = value
    return matrix
