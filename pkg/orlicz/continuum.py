"""This module contains closed-form ℝⁿ Laplacian profiles and Monte-Carlo spectral densities of
polynomial symbols ``F(λ) = (2π)^{-n} vol{ξ : σ(ξ) <= λ}``."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gamma

from .monocalc import DEFAULT_K_CANDIDATES, AsymptoticFit, StepFunction, fit_power_log
from .monocalc import step_from_values
from .utils import csv_text, parse_number, read_csv_rows
from .validator import ConfigurationError, NumericalError, ValidationError

logger = logging.getLogger(__name__)

MIN_BUDGET = 10_000
MAX_DIMENSION = 6
CHUNK_SIZE = 1 << 16
SHELL_FRACTION = 0.02
SHELL_HIT_LIMIT = 1e-3
MAX_DOUBLINGS = 30
MAX_RELATIVE_ERROR = 0.2

ArrayLike = Union[float, Sequence[float], np.ndarray]


def ball_volume(n: int) -> float:
    """Returns the volume of the unit ball of ℝⁿ."""
    return math.pi ** (n / 2) / float(gamma(n / 2 + 1))


def sphere_area(n: int) -> float:
    """Returns the area of the unit sphere ``Sⁿ ⊂ ℝⁿ⁺¹``."""
    return 2.0 * math.pi ** ((n + 1) / 2) / float(gamma((n + 1) / 2))


class RnProfile:
    """Closed-form profiles of the Laplacian of ℝⁿ, ``n >= 3``.

    ``F(λ) = C_n λ^{n/2}`` with ``C_n = (2π)^{-n} vol(Bⁿ)``, from which

    .. code-block:: text

        G(λ) = n C_n / (n - 2) · λ^{n/2 - 1}
        H(x) = ((n - 2) / (n C_n))^{2/(n-2)} · x^{n/(n-2)}

    Args:
        n (int): dimension

    Raises:
        ValidationError: if ``n < 3``, for which ``G`` diverges
    """

    def __init__(self, n: int) -> None:
        if n < 3:
            raise ValidationError(f"dimension {n} must be at least 3.", "Euclidean profile")
        self._n = n
        self._c = ball_volume(n) / (2.0 * math.pi) ** n

    def __repr__(self) -> str:
        return f"<RnProfile: n={self._n}, C_n={self._c}>"

    @property
    def n(self) -> int:
        """Returns the dimension."""
        return self._n

    @property
    def c_n(self) -> float:
        """Returns ``C_n = (2π)^{-n} vol(Bⁿ)``."""
        return self._c

    def f(self, lam: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates ``F(λ) = C_n λ^{n/2}``."""
        return self._c * np.asarray(lam, dtype=float) ** (self._n / 2)

    def g(self, lam: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates ``G(λ) = n C_n/(n-2) λ^{n/2-1}``."""
        n = self._n
        return n * self._c / (n - 2) * np.asarray(lam, dtype=float) ** (n / 2 - 1)

    def g_inverse(self, x: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates the inverse of ``G``."""
        n = self._n
        return (np.asarray(x, dtype=float) * (n - 2) / (n * self._c)) ** (2.0 / (n - 2))

    def h(self, x: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates ``H(x) = ((n-2)/(n C_n))^{2/(n-2)} x^{n/(n-2)}``."""
        n = self._n
        factor = ((n - 2) / (n * self._c)) ** (2.0 / (n - 2))
        return factor * np.asarray(x, dtype=float) ** (n / (n - 2))

    @property
    def sobolev_constant(self) -> float:
        """Returns the constant ``(1/π)(n vol(Bⁿ)/(n-2))^{1/n}`` of the Sobolev inequality
        ``‖f‖_{2n/(n-2)} <= C ‖∇f‖_2`` obtained from ``H``."""
        n = self._n
        return (n * ball_volume(n) / (n - 2)) ** (1.0 / n) / math.pi

    @property
    def aubin_constant(self) -> float:
        """Returns the best Sobolev constant ``2 (n(n-2))^{-1/2} area(Sⁿ)^{-1/n}``."""
        n = self._n
        return 2.0 / math.sqrt(n * (n - 2)) * sphere_area(n) ** (-1.0 / n)


def rn_profile(n: int) -> RnProfile:
    """Returns the ℝⁿ profile and checks that its Sobolev constant is not below the best one.

    Raises:
        ValidationError: if ``n < 3``
        NumericalError: if the Sobolev constant is below the best constant
    """
    profile = RnProfile(n)
    if profile.sobolev_constant < profile.aubin_constant:
        raise NumericalError(
            f"Sobolev constant {profile.sobolev_constant!r} is below the best constant "
            f"{profile.aubin_constant!r} in dimension {n}."
        )
    return profile


class PolynomialSymbol:
    """Real polynomial symbol ``σ(ξ) = Σ_I a_I (iξ)^I`` of a constant-coefficient operator.

    Only even total degrees give real values; ``(iξ)^I = (-1)^{|I|/2} ξ^I`` then. The Laplacian
    ``-Δ`` has monomials ``((2, 0, ...), -1), ((0, 2, ...), -1), ...``.

    Args:
        n (int): dimension
        monomials (Iterable[tuple[Sequence[int], float]]): multi-indices and real coefficients
        domain (float): if given, densities are local volumes inside ``[-domain, domain]ⁿ``

    Raises:
        ValidationError: if a multi-index is malformed, has odd or zero degree, or the domain is
            not positive
    """

    def __init__(
        self,
        n: int,
        monomials: Iterable[Tuple[Sequence[int], float]],
        domain: Optional[float] = None,
    ) -> None:
        monomials = [(tuple(int(i) for i in index), float(a)) for index, a in monomials]

        issues = []
        if n < 1:
            issues.append(f"Dimension {n} must be positive.")
        if not monomials:
            issues.append("At least one monomial is required.")
        for index, coefficient in monomials:
            if len(index) != n or any(i < 0 for i in index):
                issues.append(f"Multi-index {index} must have {n} nonnegative entries.")
            elif coefficient and sum(index) == 0:
                issues.append("A constant term violates σ(0) = 0.")
            elif coefficient and sum(index) % 2:
                issues.append(f"Monomial {index} has odd degree and an imaginary symbol.")
        if domain is not None and not domain > 0:
            issues.append(f"Domain half-width {domain} must be positive.")
        if issues:
            raise ValidationError(issues, subject="Polynomial symbol")

        self._n = n
        self._monomials = tuple(m for m in monomials if m[1])
        self._domain = domain
        self._powers = np.array([m[0] for m in self._monomials], dtype=float).reshape(-1, n)
        signs = np.array([(-1) ** (sum(m[0]) // 2) for m in self._monomials], dtype=float)
        self._coefficients = signs * np.array([m[1] for m in self._monomials])

    def __repr__(self) -> str:
        return f"<PolynomialSymbol: n={self._n}, monomials={len(self._monomials)}>"

    def __call__(self, xi: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates the symbol on points of shape ``(..., n)``."""
        xi = np.asarray(xi, dtype=float)
        terms = np.prod(xi[..., None, :] ** self._powers, axis=-1)
        return terms @ self._coefficients

    @property
    def n(self) -> int:
        """Returns the dimension."""
        return self._n

    @property
    def monomials(self) -> Tuple[Tuple[Tuple[int, ...], float], ...]:
        """Returns the nonzero monomials as ``(multi-index, a_I)`` pairs."""
        return self._monomials

    @property
    def domain(self) -> Optional[float]:
        """Returns the half-width of the sampling domain, if declared."""
        return self._domain


def laplacian_symbol(n: int) -> PolynomialSymbol:
    """Returns the symbol ``|ξ|²`` of ``-Δ`` on ℝⁿ."""
    return PolynomialSymbol(n, [(tuple(2 * (i == j) for i in range(n)), -1.0) for j in range(n)])


@dataclass(frozen=True)
class SymbolDensity:
    """Monte-Carlo estimate of ``F(λ) = (2π)^{-n} vol(D_λ)`` on a grid.

    Args:
        lambdas (np.ndarray): the λ grid
        estimates (np.ndarray): estimated ``F(λ)``, nondecreasing
        stderr (np.ndarray): binomial standard errors
        seed (int): master seed
        budget (int): number of samples
        half_width (float): half-width of the sampling box
    """

    lambdas: np.ndarray = field(repr=False)
    estimates: np.ndarray = field(repr=False)
    stderr: np.ndarray = field(repr=False)
    seed: Optional[int]
    budget: int
    half_width: float

    def step_function(self) -> StepFunction:
        """Returns the estimate as a step function with atoms at the grid points."""
        positive = self.lambdas > 0
        return step_from_values(self.lambdas[positive], self.estimates[positive])

    def relative_error(self) -> np.ndarray:
        """Returns ``stderr / estimate`` (``inf`` where the estimate vanishes)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.estimates > 0, self.stderr / self.estimates, math.inf)

    def to_csv(self, meta: Optional[dict] = None) -> str:
        """Serializes the density as ``lambda,weight,stderr`` with atom weights and the standard
        error of ``F`` at each grid point."""
        weights = np.diff(self.estimates, prepend=0.0)
        meta = {"seed": "" if self.seed is None else self.seed, **(meta or {})}
        rows = zip(self.lambdas.tolist(), weights.tolist(), self.stderr.tolist())
        return csv_text(meta, ("lambda", "weight", "stderr"), rows)

    @classmethod
    def from_csv(cls, text: str, seed: Optional[int] = None, budget: int = 0) -> SymbolDensity:
        """Reads a density written by :meth:`to_csv`."""
        header, rows = read_csv_rows(text)
        if header[:3] != ["lambda", "weight", "stderr"]:
            raise ValidationError(f"Expected 'lambda,weight,stderr', got {header}.", "Density CSV")
        values = np.array([[parse_number(c) for c in row[:3]] for row in rows]).reshape(-1, 3)
        return cls(values[:, 0], np.cumsum(values[:, 1]), values[:, 2], seed, budget, math.nan)


def _radial_extent(symbol: PolynomialSymbol, level: float, rng: np.random.Generator) -> float:
    """Estimates the extent of ``{σ <= level}`` along random rays."""
    directions = rng.standard_normal((1000, symbol.n))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)

    extent = 0.0
    for u in directions:
        t = 1e-6
        while symbol(t * u) <= level:
            t *= 2.0
            if t > 1e6:
                raise ConfigurationError(
                    "The sublevel set appears unbounded; declare a sampling domain."
                )
        extent = max(extent, t)
    return extent


def _sample_chunk(
    symbol: PolynomialSymbol,
    lambdas: np.ndarray,
    half_width: float,
    size: int,
    seed: np.random.SeedSequence,
) -> Tuple[np.ndarray, int]:
    """Returns the counts of ``σ <= λ`` per grid point and the shell hits of one chunk."""
    rng = np.random.default_rng(seed)
    points = rng.uniform(-half_width, half_width, size=(size, symbol.n))
    values = symbol(points)
    if np.any(values < -1e-12 * max(1.0, float(np.max(np.abs(values))))):
        raise ValidationError("The symbol takes negative values.", "Polynomial symbol")

    counts = np.searchsorted(np.sort(values), lambdas, side="right")
    shell = np.max(np.abs(points), axis=1) > (1.0 - SHELL_FRACTION) * half_width
    hits = int(np.count_nonzero(shell & (values <= lambdas[-1])))
    return counts, hits


def symbol_density(
    symbol: PolynomialSymbol,
    lambdas: ArrayLike,
    budget: int = 1_000_000,
    seed: Optional[int] = None,
    half_width: Optional[float] = None,
    jobs: int = 1,
) -> SymbolDensity:
    """Estimates ``F(λ) = (2π)^{-n} vol{σ <= λ}`` on a grid by uniform sampling of a box.

    All grid points share one sample set, so the estimate is nondecreasing in λ. Samples are drawn
    in chunks whose seeds are spawned from the master seed; counts are summed, so the result does
    not depend on the number of workers.

    Args:
        symbol (PolynomialSymbol): the symbol
        lambdas (array): nonnegative, strictly increasing grid
        budget (int): number of samples, at least ``10⁴``
        seed (int): master seed
        half_width (float): half-width of the sampling box; estimated when omitted (ignored when
            the symbol declares a domain)
        jobs (int): number of worker threads

    Returns:
        SymbolDensity: estimates and standard errors

    Raises:
        ValidationError: if the grid or the budget is invalid, or the dimension exceeds 6
        ConfigurationError: if boundary hits exceed 0.1% of the accepted samples in a given box
    """
    lambdas = np.asarray(lambdas, dtype=float).ravel()
    issues = []
    if not len(lambdas) or np.any(lambdas < 0) or np.any(np.diff(lambdas) <= 0):
        issues.append("The λ grid must be nonnegative and strictly increasing.")
    if budget < MIN_BUDGET:
        issues.append(f"Budget {budget} is below {MIN_BUDGET}.")
    if symbol.n > MAX_DIMENSION:
        issues.append(f"Dimension {symbol.n} exceeds {MAX_DIMENSION}.")
    if issues:
        raise ValidationError(issues, subject="Symbol density")

    master = np.random.SeedSequence(seed)
    local = symbol.domain is not None
    auto = half_width is None and not local
    if local:
        half_width = symbol.domain
    elif auto:
        pilot = np.random.default_rng(master.spawn(1)[0])
        half_width = 1.25 * _radial_extent(symbol, float(lambdas[-1]), pilot)

    chunks = [CHUNK_SIZE] * (budget // CHUNK_SIZE)
    if budget % CHUNK_SIZE:
        chunks.append(budget % CHUNK_SIZE)

    for _ in range(MAX_DOUBLINGS):
        seeds = np.random.SeedSequence(master.entropy, spawn_key=(1,)).spawn(len(chunks))
        args = [(symbol, lambdas, half_width, size, s) for size, s in zip(chunks, seeds)]
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(lambda a: _sample_chunk(*a), args))
        else:
            results = [_sample_chunk(*a) for a in args]

        counts = np.sum([r[0] for r in results], axis=0)
        hits = sum(r[1] for r in results)
        accepted = int(counts[-1])
        if local or hits <= SHELL_HIT_LIMIT * max(accepted, 1):
            break

        if not auto:
            raise ConfigurationError(
                f"Sampling box of half-width {half_width} is too small: {hits} boundary hits "
                f"for {accepted} accepted samples."
            )
        logger.info("Doubling the sampling box: %d boundary hits.", hits)
        half_width *= 2.0
    else:
        raise ConfigurationError("The sampling box did not stabilize.")

    if lambdas[0] == 0 and counts[0]:
        raise NumericalError("The sublevel set {σ <= 0} has positive sampled measure.")

    scale = (2.0 * half_width / (2.0 * math.pi)) ** symbol.n
    fraction = counts / budget
    estimates = scale * fraction
    stderr = scale * np.sqrt(fraction * (1.0 - fraction) / budget)
    logger.debug(
        "Symbol density: n=%d, budget=%d, half-width=%s, accepted=%d",
        symbol.n,
        budget,
        half_width,
        accepted,
    )
    return SymbolDensity(lambdas, estimates, stderr, seed, budget, float(half_width))


def exponent_readoff(
    density: SymbolDensity,
    window: Tuple[float, float],
    k_candidates: Iterable[int] = DEFAULT_K_CANDIDATES,
) -> AsymptoticFit:
    """Fits ``F(λ) ~ c λ^α |ln λ|^k`` through the Monte-Carlo estimates inside a window.

    Args:
        density (SymbolDensity): the estimates
        window (tuple[float, float]): fit window ``0 < lo < hi``
        k_candidates (Iterable[int]): candidate log-exponents

    Returns:
        AsymptoticFit: the fit, with the largest relative Monte-Carlo error in ``mc_error``

    Raises:
        ValidationError: if the window holds fewer than 8 grid points or a relative error of
            20% or more
    """
    lo, hi = window
    if not 0 < lo < hi:
        raise ValidationError(f"Window {window} must satisfy 0 < lo < hi.", "Exponent read-off")

    mask = (density.lambdas >= lo) & (density.lambdas <= hi)
    errors = density.relative_error()[mask]
    if mask.sum() < 8:
        raise ValidationError(
            f"Window {window} holds {int(mask.sum())} grid points; at least 8 are required.",
            "Exponent read-off",
        )
    if np.max(errors) >= MAX_RELATIVE_ERROR:
        raise ValidationError(
            f"Window {window} is too noisy: relative error {float(np.max(errors)):.3f}.",
            "Exponent read-off",
        )

    fit = fit_power_log(density.lambdas[mask], density.estimates[mask], (lo, hi), k_candidates)
    return replace(fit, mc_error=float(np.max(errors)))
