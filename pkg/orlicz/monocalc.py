"""This module contains the calculus of atomic monotone functions: the spectral decay ``F`` and
the transforms derived from it.

All spectral measures handled here are atomic, so every Stieltjes integral is a finite sum:

.. code-block:: text

    F(λ) = Σ_{λ_i ≤ λ} w_i              G(λ) = Σ_{λ_i ≤ λ} w_i / λ_i
    L̂(t) = Σ w_i exp(-λ_i t)            M̂(t) = Σ (w_i / λ_i) exp(-λ_i t)
    H(y) = y G⁻¹(y)                     N(y) = y / M̂⁻¹(y)

Inverses of bounded step functions are infinite above the total mass; this branch is represented
by :data:`INFINITY` and propagates through ``H`` and ``N``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from .report import CertificationReport, CheckRecord
from .utils import csv_text, parse_number, read_csv_rows
from .validator import ConfigurationError, ValidationError

logger = logging.getLogger(__name__)

INFINITY = math.inf
"""float: Sentinel returned by inverses of bounded step functions above their total mass."""

DEFAULT_K_CANDIDATES = (0, 1, 2)

Number = Union[float, int]
ArrayLike = Union[Number, Sequence[Number], np.ndarray]
Samples = Union[Sequence[Tuple[float, float]], np.ndarray]


def _frozen(values: ArrayLike) -> np.ndarray:
    """Returns a read-only float copy of the given values."""
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def _like(values: np.ndarray, reference: ArrayLike) -> Union[float, np.ndarray]:
    """Returns a Python float when the reference argument is a scalar."""
    if np.ndim(reference) == 0:
        return float(values)
    return values


class StepFunction:
    """Atomic nondecreasing right-continuous function ``F(λ) = Σ_{λ_i ≤ λ} w_i``.

    Args:
        locations (Sequence[float]): strictly increasing, strictly positive atom locations
        weights (Sequence[float]): strictly positive atom weights

    Raises:
        ValidationError: if the atoms violate any of the conditions above
    """

    def __init__(self, locations: ArrayLike = (), weights: ArrayLike = ()) -> None:
        locations = np.asarray(locations, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()

        issues = []
        if locations.shape != weights.shape:
            issues.append(f"{len(locations)} locations but {len(weights)} weights were given.")
        else:
            if not np.all(np.isfinite(locations)) or not np.all(np.isfinite(weights)):
                issues.append("Atoms must be finite.")
            if np.any(locations <= 0):
                issues.append("Atom locations must be strictly positive.")
            if np.any(weights <= 0):
                issues.append("Atom weights must be strictly positive.")
            if np.any(np.diff(locations) <= 0):
                issues.append("Atom locations must be strictly increasing.")
        if issues:
            raise ValidationError(issues, subject="Step function")

        self._locations = _frozen(locations)
        self._weights = _frozen(weights)
        self._cumulative = _frozen(np.cumsum(weights))

    def __repr__(self) -> str:
        return f"<StepFunction: atoms={len(self)}, mass={self.total_mass}>"

    def __len__(self) -> int:
        return len(self._locations)

    def __eq__(self, other) -> bool:
        if isinstance(other, StepFunction):
            return np.array_equal(self._locations, other.locations) and np.array_equal(
                self._weights, other.weights
            )
        return NotImplemented

    def __call__(self, lam: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates ``F(λ)``, the sum of the weights at locations ``≤ λ``."""
        return self._cumulative_at(lam, side="right")

    def left_limit(self, lam: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates ``F(λ⁻)``, the sum of the weights at locations ``< λ``."""
        return self._cumulative_at(lam, side="left")

    def _cumulative_at(self, lam: ArrayLike, side: str) -> Union[float, np.ndarray]:
        lam_arr = np.asarray(lam, dtype=float)
        if not len(self):
            return _like(np.zeros_like(lam_arr), lam)

        idx = np.searchsorted(self._locations, lam_arr, side=side)
        values = np.where(idx > 0, self._cumulative[np.maximum(idx - 1, 0)], 0.0)
        return _like(values, lam)

    @property
    def locations(self) -> np.ndarray:
        """Returns the atom locations in ascending order."""
        return self._locations

    @property
    def weights(self) -> np.ndarray:
        """Returns the atom weights."""
        return self._weights

    @property
    def cumulative(self) -> np.ndarray:
        """Returns the values ``F(λ_i)`` at the atom locations."""
        return self._cumulative

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        """Returns the atoms as ``(location, weight)`` pairs."""
        return list(zip(self._locations.tolist(), self._weights.tolist()))

    @property
    def total_mass(self) -> float:
        """Returns the value of ``F`` beyond its last atom."""
        return float(self._cumulative[-1]) if len(self) else 0.0

    @property
    def is_empty(self) -> bool:
        """Returns whether the function vanishes identically."""
        return not len(self)

    def scaled(self, factor: float) -> StepFunction:
        """Returns the step function with every weight multiplied by a positive factor."""
        if factor <= 0:
            raise ValidationError(f"Scale factor {factor} must be positive.", "Step function")
        return StepFunction(self._locations, self._weights * factor)

    def window(self, lo: float, hi: float) -> np.ndarray:
        """Returns a boolean mask of the atoms with ``lo <= λ_i <= hi``."""
        return (self._locations >= lo) & (self._locations <= hi)


def step_from_atoms(atoms: Iterable[Tuple[float, float]]) -> StepFunction:
    """Builds a step function from ``(location, weight)`` pairs.

    Duplicated locations are merged by summing their weights.

    Args:
        atoms (Iterable[tuple[float, float]]): atoms in any order

    Returns:
        StepFunction: the canonical step function

    Raises:
        ValidationError: if a location or a weight is not strictly positive
    """
    pairs = np.asarray(list(atoms), dtype=float).reshape(-1, 2)
    if not len(pairs):
        return StepFunction()

    locations, weights = pairs[:, 0], pairs[:, 1]
    issues = []
    if np.any(~np.isfinite(pairs)):
        issues.append("Atoms must be finite.")
    if np.any(locations <= 0):
        issues.append("Atom locations must be strictly positive.")
    if np.any(weights <= 0):
        issues.append("Atom weights must be strictly positive.")
    if issues:
        raise ValidationError(issues, subject="Step function")

    unique, inverse = np.unique(locations, return_inverse=True)
    return StepFunction(unique, np.bincount(inverse, weights=weights))


def step_from_values(locations: ArrayLike, values: ArrayLike) -> StepFunction:
    """Builds the step function taking the given values at the given locations.

    Locations whose value does not increase are dropped.

    Args:
        locations (Sequence[float]): strictly increasing positive locations
        values (Sequence[float]): nondecreasing nonnegative values ``F(λ_i)``

    Returns:
        StepFunction: the step function with ``F(λ_i) = values[i]``
    """
    locations = np.asarray(locations, dtype=float)
    values = np.asarray(values, dtype=float)
    jumps = np.diff(values, prepend=0.0)
    if np.any(jumps < 0):
        raise ValidationError("Values must be nondecreasing and nonnegative.", "Step function")

    keep = jumps > 0
    return StepFunction(locations[keep], jumps[keep])


def right_inverse_increasing(F: StepFunction, y: ArrayLike) -> Union[float, np.ndarray]:
    """Evaluates the right-continuous inverse ``F⁻¹(y) = sup{λ : F(λ) <= y}``.

    Args:
        F (StepFunction): nondecreasing step function
        y (float, array): nonnegative levels

    Returns:
        float, array: the inverse; :data:`INFINITY` where ``y`` reaches the total mass of ``F``
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0) or np.any(np.isnan(y_arr)):
        raise ValidationError("Inverse levels must be nonnegative.", "Inverse argument")
    if F.is_empty:
        return _like(np.full_like(y_arr, INFINITY), y)

    # number of atoms whose cumulative value is <= y; the sup is the next atom location
    j = np.searchsorted(F.cumulative, y_arr, side="right")
    values = np.where(j < len(F), F.locations[np.minimum(j, len(F) - 1)], INFINITY)
    return _like(values, y)


def g_transform(F: StepFunction) -> StepFunction:
    """Returns ``G(λ) = ∫₀^λ dF(u) / u``, i.e. the atoms ``(λ_i, w_i / λ_i)``."""
    return StepFunction(F.locations, F.weights / F.locations)


class OrliczProfile:
    """The Orlicz functions derived from one spectral decay ``F``.

    Args:
        base (StepFunction): the spectral decay ``F``
        tolerance (float): absolute tolerance used when inverting ``M̂``
    """

    def __init__(self, base: StepFunction, tolerance: float = 1e-14) -> None:
        if tolerance <= 0:
            raise ValidationError("Evaluation tolerance must be positive.", "Orlicz profile")

        self._base = base
        self._g = g_transform(base)
        self._tolerance = tolerance

    def __repr__(self) -> str:
        return f"<OrliczProfile: atoms={len(self._base)}, G_max={self.g.total_mass}>"

    @property
    def base(self) -> StepFunction:
        """Returns the spectral decay ``F``."""
        return self._base

    @property
    def g(self) -> StepFunction:
        """Returns the cached G-transform of ``F``."""
        return self._g

    @property
    def tolerance(self) -> float:
        """Returns the evaluation tolerance."""
        return self._tolerance

    @property
    def m_zero(self) -> float:
        """Returns ``M̂(0⁺)``, which equals ``G`` beyond its last atom."""
        return self._g.total_mass


def h_profile(profile: OrliczProfile, y: ArrayLike) -> Union[float, np.ndarray]:
    """Evaluates ``H(y) = y G⁻¹(y)`` with ``H(0) = 0``.

    Returns:
        float, array: ``H(y)``; :data:`INFINITY` for ``y`` at or above the total mass of ``G``
        and ``0`` everywhere for an empty spectrum
    """
    y_arr = np.asarray(y, dtype=float)
    if profile.base.is_empty:
        return _like(np.zeros_like(y_arr), y)
    inverse = np.asarray(right_inverse_increasing(profile.g, y_arr))
    with np.errstate(invalid="ignore"):
        values = np.where(y_arr == 0, 0.0, y_arr * inverse)
    return _like(values, y)


def heat_profiles(
    profile: OrliczProfile, t: ArrayLike
) -> Tuple[Union[float, np.ndarray], Union[float, np.ndarray]]:
    """Evaluates the Laplace transforms ``L̂(t) = 𝓛(dF)(t)`` and ``M̂(t) = 𝓛(dG)(t)``.

    Both bound the ultracontractive norms ``L(t) = ‖e^{-tA}Π_V‖`` and
    ``M(t) = ‖A⁻¹e^{-tA}Π_V‖`` from above, with equality for scalar invariant operators.

    Args:
        profile (OrliczProfile): the profile
        t (float, array): nonnegative times

    Returns:
        tuple: the values ``(L̂(t), M̂(t))``
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise ValidationError("Heat times must be nonnegative.", "Heat profile argument")

    base = profile.base
    decay = np.exp(-np.multiply.outer(t_arr, base.locations))
    l_hat = decay @ base.weights
    m_hat = decay @ profile.g.weights
    return _like(l_hat, t), _like(m_hat, t)


def m_inverse(profile: OrliczProfile, y: ArrayLike) -> Union[float, np.ndarray]:
    """Evaluates ``M̂⁻¹(y) = inf{t >= 0 : M̂(t) <= y}`` for the decreasing ``M̂``.

    Returns:
        float, array: ``0`` for ``y >= M̂(0)`` and :data:`INFINITY` for ``y = 0``
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0) or np.any(np.isnan(y_arr)):
        raise ValidationError("Inverse levels must be nonnegative.", "Inverse argument")

    m_zero = profile.m_zero
    first = profile.base.locations[0] if not profile.base.is_empty else 0.0

    def _solve(level: float) -> float:
        if level >= m_zero:
            return 0.0
        if level <= 0:
            return INFINITY

        # M̂(t) <= M̂(0) exp(-λ_1 t), so the root lies at or below this bound
        upper = math.log(m_zero / level) / first

        def excess(s: float) -> float:
            return float(heat_profiles(profile, s)[1]) - level

        # all G-mass at λ_1 puts the root on the bound itself, up to rounding
        if excess(upper) >= -profile.tolerance * level:
            return upper
        return brentq(
            excess,
            0.0,
            upper,
            xtol=profile.tolerance,
            maxiter=500,
        )

    values = np.array([_solve(float(v)) for v in y_arr.ravel()]).reshape(y_arr.shape)
    return _like(values, y)


def n_profile(profile: OrliczProfile, y: ArrayLike) -> Union[float, np.ndarray]:
    """Evaluates ``N(y) = y / M̂⁻¹(y)``.

    Args:
        profile (OrliczProfile): the profile
        y (float, array): positive levels

    Returns:
        float, array: ``N(y)``; :data:`INFINITY` for ``y >= M̂(0⁺)`` and ``0`` everywhere for an
        empty spectrum
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0):
        raise ValidationError("N-profile levels must be positive.", "N-profile argument")
    if profile.base.is_empty:
        return _like(np.zeros_like(y_arr), y)

    inverse = np.asarray(m_inverse(profile, y_arr))
    with np.errstate(divide="ignore"):
        values = np.where(inverse > 0, y_arr / np.where(inverse > 0, inverse, 1.0), INFINITY)
    return _like(values, y)


class ConvexMinorant:
    """Piecewise-linear convex function given by its breakpoints.

    Args:
        ys (Sequence[float]): strictly increasing breakpoint abscissae
        values (Sequence[float]): values at the breakpoints

    Raises:
        ValidationError: if the abscissae are not increasing or the slopes decrease
    """

    def __init__(self, ys: ArrayLike, values: ArrayLike) -> None:
        ys = np.asarray(ys, dtype=float).ravel()
        values = np.asarray(values, dtype=float).ravel()

        issues = []
        if len(ys) == 0 or ys.shape != values.shape:
            issues.append("Breakpoints must be non-empty pairs.")
        elif np.any(np.diff(ys) <= 0):
            issues.append("Breakpoint abscissae must be strictly increasing.")
        else:
            slopes = np.diff(values) / np.diff(ys)
            scale = max(1.0, float(np.max(np.abs(slopes)))) if len(slopes) else 1.0
            if np.any(np.diff(slopes) < -1e-9 * scale):
                issues.append("Slopes must be nondecreasing.")
        if issues:
            raise ValidationError(issues, subject="Convex minorant")

        self._ys = _frozen(ys)
        self._values = _frozen(values)

    def __repr__(self) -> str:
        lo, hi = self.interval
        return f"<ConvexMinorant: breakpoints={len(self._ys)}, interval=[{lo}, {hi}]>"

    def __call__(self, y: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates the minorant by linear interpolation inside its interval."""
        y_arr = np.asarray(y, dtype=float)
        lo, hi = self.interval
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any(y_arr < lo - slack) or np.any(y_arr > hi + slack):
            raise ValidationError(
                f"Argument outside the minorant interval [{lo}, {hi}].", "Minorant argument"
            )
        return _like(np.interp(y_arr, self._ys, self._values), y)

    @property
    def ys(self) -> np.ndarray:
        """Returns the breakpoint abscissae."""
        return self._ys

    @property
    def values(self) -> np.ndarray:
        """Returns the breakpoint values."""
        return self._values

    @property
    def breakpoints(self) -> List[Tuple[float, float]]:
        """Returns the breakpoints as ``(y, value)`` pairs."""
        return list(zip(self._ys.tolist(), self._values.tolist()))

    @property
    def slopes(self) -> np.ndarray:
        """Returns the slopes between consecutive breakpoints."""
        return np.diff(self._values) / np.diff(self._ys)

    @property
    def interval(self) -> Tuple[float, float]:
        """Returns the interval on which the minorant is defined."""
        return float(self._ys[0]), float(self._ys[-1])

    def contains(self, y: float) -> bool:
        """Returns whether ``y`` lies in the interval of the minorant."""
        lo, hi = self.interval
        return lo <= y <= hi

    def is_below(self, samples: Samples, tol: float = 1e-12) -> bool:
        """Returns whether the minorant lies below the given samples inside its interval."""
        pts = np.asarray(samples, dtype=float).reshape(-1, 2)
        inside = (pts[:, 0] >= self._ys[0]) & (pts[:, 0] <= self._ys[-1])
        values = np.interp(pts[inside, 0], self._ys, self._values)
        scale = np.maximum(1.0, np.abs(pts[inside, 1]))
        return bool(np.all(values <= pts[inside, 1] + tol * scale))


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_minorant(
    samples: Samples, interval: Optional[Tuple[float, float]] = None, anchor: bool = True
) -> ConvexMinorant:
    """Computes the largest convex minorant of a sampled target, i.e. the lower boundary of the
    convex hull of the samples.

    Samples sharing an abscissa are merged by keeping the smallest value.

    Args:
        samples (Sequence[tuple[float, float]]): ``(y, value)`` samples with nonnegative values
        interval (tuple[float, float]): if given, samples outside ``[lo, hi]`` are ignored
        anchor (bool): whether the minorant is anchored at ``(0, 0)``

    Returns:
        ConvexMinorant: the lower convex hull

    Raises:
        ValidationError: if fewer than two samples remain or a value is negative
    """
    pts = np.asarray(samples, dtype=float).reshape(-1, 2)
    if interval is not None:
        lo, hi = interval
        pts = pts[(pts[:, 0] >= lo) & (pts[:, 0] <= hi)]

    issues = []
    if len(pts) < 2:
        issues.append(f"At least two samples are required, got {len(pts)}.")
    if not np.all(np.isfinite(pts)):
        issues.append("Samples must be finite.")
    elif np.any(pts[:, 1] < 0):
        issues.append("Sample values must be nonnegative.")
    if issues:
        raise ValidationError(issues, subject="Minorant samples")

    if anchor:
        pts = np.vstack([[0.0, 0.0], pts[pts[:, 0] >= 0]])

    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    _, first = np.unique(pts[:, 0], return_index=True)
    pts = pts[first]

    # Andrew's monotone chain, lower half
    hull: List[np.ndarray] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)

    hull_arr = np.array(hull)
    return ConvexMinorant(hull_arr[:, 0], hull_arr[:, 1])


def inverse_target_samples(F: StepFunction, squared: bool = False) -> np.ndarray:
    """Returns the corner points of the target ``y F⁻¹(y)`` on ``[0, F_max]``.

    On ``[F(λ_{i-1}), F(λ_i))`` the target equals ``y λ_i``; both ends of every piece are returned
    (the right end as a left limit), so the lower hull of these points is the largest convex
    minorant of the target. With ``squared`` the target is ``s F⁻¹(s²)`` on ``[0, √F_max]``.

    Returns:
        np.ndarray: array of shape ``(2 * len(F), 2)``
    """
    upper = F.cumulative
    lower = np.concatenate(([0.0], upper[:-1]))
    if squared:
        lower, upper = np.sqrt(lower), np.sqrt(upper)

    left = np.column_stack([lower, lower * F.locations])
    right = np.column_stack([upper, upper * F.locations])
    return np.vstack([left, right]) if len(F) else np.zeros((0, 2))


def staircase_samples(ys: ArrayLike, values: ArrayLike) -> np.ndarray:
    """Returns the lower staircase of a nondecreasing target sampled at increasing ``ys``.

    Between ``ys[j]`` and ``ys[j + 1]`` the target is at least ``values[j]``, so any convex
    minorant of the staircase lies below the target on ``[0, ys[-1]]``. The staircase starts at
    ``(0, 0)`` and assumes a nonnegative target.
    """
    ys = np.asarray(ys, dtype=float)
    values = np.asarray(values, dtype=float)
    floor = [[0.0, 0.0], [ys[0], 0.0]]
    treads = np.column_stack([ys[1:], values[:-1]])
    risers = np.column_stack([ys, values])
    return np.vstack([floor, treads, risers])


def nash_minorant(F: StepFunction) -> ConvexMinorant:
    """Returns the largest convex minorant of ``y F⁻¹(y)`` on ``[0, F_max]``, anchored at the
    origin."""
    if F.is_empty:
        return ConvexMinorant([0.0], [0.0])
    return convex_minorant(inverse_target_samples(F))


def sobolev_minorant(
    profile: OrliczProfile, route: str = "h", grid_size: int = 400
) -> ConvexMinorant:
    """Returns a convex minorant for the Jensen-route Nash inequality.

    * ``route="h"``: largest convex minorant of ``s G⁻¹(s²)`` on ``[0, √G_max]`` (exact corners).
    * ``route="n"``: convex minorant of the staircase of ``s / M̂⁻¹(s²)`` sampled on a log grid
      of ``(0, 0.75 √M̂(0)]``.

    Args:
        profile (OrliczProfile): the profile
        route (str): ``"h"`` or ``"n"``
        grid_size (int): number of samples for the heat route

    Returns:
        ConvexMinorant: the minorant
    """
    if route not in ("h", "n"):
        raise ValidationError(f"Route '{route}' must be 'h' or 'n'.", "Minorant route")
    if profile.base.is_empty:
        return ConvexMinorant([0.0], [0.0])

    if route == "h":
        return convex_minorant(inverse_target_samples(profile.g, squared=True))

    s_max = 0.75 * math.sqrt(profile.m_zero)
    ys = np.geomspace(s_max * 1e-6, s_max, grid_size)
    values = ys / np.asarray(m_inverse(profile, ys**2))
    return convex_minorant(staircase_samples(ys, values))


def power_law_bound(F: StepFunction, alpha: float) -> Tuple[float, float]:
    """Returns the constants of the polynomial decay bounds ``F(λ) <= C λ^α`` and
    ``G(λ) <= C₁ λ^{α-1}`` with ``C₁ = C α / (α - 1)``.

    ``C`` is the smallest constant valid for every ``λ > 0``: since ``F`` is constant between atoms
    the supremum of ``F(λ) / λ^α`` is attained at an atom.

    Args:
        F (StepFunction): spectral decay
        alpha (float): exponent, strictly greater than one

    Returns:
        tuple[float, float]: the constants ``(C, C₁)``
    """
    if alpha <= 1:
        raise ValidationError(f"Exponent {alpha} must be greater than 1.", "Power law")
    if F.is_empty:
        return 0.0, 0.0

    c = float(np.max(F.cumulative / F.locations**alpha))
    return c, c * alpha / (alpha - 1)


@dataclass(frozen=True)
class SandwichReport:
    """Outcome of :func:`growth_sandwich`.

    Args:
        epsilon (float): growth parameter
        tested (tuple[float, ...]): tested atom locations
        condition (tuple[bool, ...]): whether ``F(2λ) >= 2(1+ε)F(λ)`` holds at each tested λ
        records (tuple[CheckRecord, ...]): condition, lower and upper sandwich records
    """

    epsilon: float
    tested: Tuple[float, ...]
    condition: Tuple[bool, ...]
    records: Tuple[CheckRecord, ...] = field(repr=False)

    @property
    def condition_holds(self) -> bool:
        """Returns whether the growing condition holds at every tested λ."""
        return bool(self.tested) and all(self.condition)

    @property
    def sandwich_verified(self) -> bool:
        """Returns whether every evaluated sandwich record passed."""
        return all(r.passed for r in self.records if r.check.startswith("sandwich"))


def growth_sandwich(
    F: StepFunction, epsilon: float, lam_range: Optional[Tuple[float, float]] = None
) -> SandwichReport:
    """Tests the growing condition ``F(2λ) >= 2(1+ε)F(λ)`` and the resulting sandwich
    ``(2 + 1/ε)F(λ) >= λG(λ) >= F(λ)``.

    The lower bound holds unconditionally and is checked at every atom in range. The upper bound
    is proved at λ as soon as the condition holds at every atom ``u <= λ/2`` (``F`` is constant
    between atoms, so atoms are the worst case), and is checked exactly there.

    Args:
        F (StepFunction): spectral decay
        epsilon (float): positive growth parameter
        lam_range (tuple[float, float]): range of tested atoms; defaults to the whole support

    Returns:
        SandwichReport: the outcome
    """
    if epsilon <= 0:
        raise ValidationError(f"Growth parameter {epsilon} must be positive.", "Growth sandwich")
    if F.is_empty:
        return SandwichReport(epsilon, (), (), ())

    lo, hi = lam_range if lam_range is not None else (F.locations[0], F.locations[-1])
    locs = F.locations
    g = g_transform(F)
    factor = 2.0 * (1.0 + epsilon)

    # the condition is only informative while 2λ stays inside the support
    measurable = 2.0 * locs <= locs[-1]
    holds_at = F(2.0 * locs) >= factor * F(locs) * (1 - 1e-12)

    records: List[CheckRecord] = []
    tested, condition = [], []
    for lam, fval, gval in zip(locs, F.cumulative, g.cumulative):
        if lam < lo or lam > hi:
            continue
        param = f"lambda={lam!r}"
        records.append(CheckRecord("sandwich_lower", lam * gval, fval, ">=", param))

        idx = int(np.searchsorted(locs, lam))
        if measurable[idx]:
            tested.append(float(lam))
            condition.append(bool(holds_at[idx]))
            records.append(
                CheckRecord(
                    "growth_condition",
                    float(F(2.0 * lam)),
                    factor * fval,
                    ">=",
                    param,
                    theorem_backed=False,
                )
            )

        below = locs <= lam / 2
        if np.all(holds_at[below] & measurable[below]):
            upper = (2.0 + 1.0 / epsilon) * fval
            records.append(CheckRecord("sandwich_upper", lam * gval, upper, "<=", param))

    return SandwichReport(epsilon, tuple(tested), tuple(condition), tuple(records))


def laplace_comparison(
    profile: OrliczProfile,
    t_grid: ArrayLike,
    n: int = 1,
    measured: Optional[Tuple[ArrayLike, ArrayLike]] = None,
    invariant: bool = False,
    y_grid: Optional[ArrayLike] = None,
    u_grid: Optional[ArrayLike] = None,
) -> CertificationReport:
    """Compares the spectral profiles ``F, G`` with the heat profiles through Laplace transforms.

    Records, per grid point:

    * ``laplace_L``/``laplace_M``: measured ``L(t) <= 𝓛(dF)(t)`` and ``M(t) <= 𝓛(dG)(t)``;
    * ``laplace_L_reverse``/``laplace_M_reverse``: ``𝓛(dF) <= nL`` and ``𝓛(dG) <= nM`` for
      invariant instances;
    * ``laplace_G``: ``G(y) <= n e M̂(1/y)``, by default at every atom;
    * ``laplace_growth``: ``M̂(1/y) <= 3G(2Cy)`` when ``G(uy) <= e^{Cu}G(y)`` is detected on the
      ``(u, y)`` grid with fitted ``C`` (grid-based, hence not theorem-backed).

    Args:
        profile (OrliczProfile): the profile
        t_grid (array): positive times
        n (int): fiber dimension, 1 for scalar instances
        measured (tuple[array, array]): measured ``(L(t), M(t))`` on ``t_grid``
        invariant (bool): whether the instance is invariant under a transitive group action
        y_grid (array): levels for the ``G``/``M̂`` comparisons; defaults to the atoms
        u_grid (array): dilations for the growth detection; defaults to ``geomspace(1e-2, 1e2)``

    Returns:
        CertificationReport: the records

    Raises:
        ConfigurationError: if an invariant comparison is requested without measured norms
    """
    t_arr = np.asarray(t_grid, dtype=float).ravel()
    if np.any(t_arr <= 0):
        raise ValidationError("Laplace comparison times must be positive.", "Time grid")
    if n < 1:
        raise ValidationError(f"Fiber dimension {n} must be at least 1.", "Laplace comparison")
    if invariant and measured is None:
        raise ConfigurationError("Invariant Laplace comparisons require measured L and M.")

    report = CertificationReport()
    if profile.base.is_empty:
        report.add(CheckRecord.skipped("laplace", "vacuous", "empty spectrum"))
        return report

    l_hat, m_hat = heat_profiles(profile, t_arr)
    if measured is not None:
        l_meas, m_meas = (np.asarray(v, dtype=float).ravel() for v in measured)
        if l_meas.shape != t_arr.shape or m_meas.shape != t_arr.shape:
            raise ConfigurationError("Measured heat norms must match the time grid.")

        for t, lm, mm, lh, mh in zip(t_arr, l_meas, m_meas, l_hat, m_hat):
            param = f"t={t!r}"
            report.add(CheckRecord("laplace_L", lm, lh, "<=", param))
            report.add(CheckRecord("laplace_M", mm, mh, "<=", param))
            if invariant:
                report.add(CheckRecord("laplace_L_reverse", lh, n * lm, "<=", param))
                report.add(CheckRecord("laplace_M_reverse", mh, n * mm, "<=", param))

    ys = profile.base.locations if y_grid is None else np.asarray(y_grid, dtype=float).ravel()
    g_vals = profile.g(ys)
    m_inv = heat_profiles(profile, 1.0 / ys)[1]
    for y, gv, mv in zip(ys, g_vals, m_inv):
        report.add(CheckRecord("laplace_G", gv, n * math.e * mv, "<=", f"y={y!r}"))

    us = np.geomspace(1e-2, 1e2, 41) if u_grid is None else np.asarray(u_grid, dtype=float)
    positive = ys[g_vals > 0]
    if len(positive):
        ratios = np.log(profile.g(np.multiply.outer(us, positive)) / profile.g(positive))
        growth = float(np.max(ratios / us[:, None]))
        growth = max(growth, np.finfo(float).tiny)
        logger.debug("Exponential growth constant detected on the grid: C=%s", growth)
        for y in positive:
            lhs = float(heat_profiles(profile, 1.0 / y)[1])
            rhs = 3.0 * float(profile.g(2.0 * growth * y))
            report.add(
                CheckRecord(
                    "laplace_growth", lhs, rhs, "<=", f"y={y!r} C={growth!r}", theorem_backed=False
                )
            )
    return report


@dataclass(frozen=True)
class AsymptoticFit:
    """Least-squares fit ``F(λ) ≈ c λ^α |ln λ|^k`` on a window.

    Args:
        alpha (float): fitted exponent
        k (int): selected log-exponent
        c (float): fitted constant
        residual (float): RMS of the log-residuals for the selected ``k``
        window (tuple[float, float]): fit window
        residuals (dict[int, float]): RMS residual for every candidate ``k``
        points (int): number of fitted points
        mc_error (float): largest relative Monte-Carlo error in the window, if any
    """

    alpha: float
    k: int
    c: float
    residual: float
    window: Tuple[float, float]
    residuals: Dict[int, float] = field(default_factory=dict, compare=False)
    points: int = 0
    mc_error: Optional[float] = None

    def __call__(self, lam: ArrayLike) -> Union[float, np.ndarray]:
        """Evaluates the fitted model."""
        lam_arr = np.asarray(lam, dtype=float)
        values = self.c * lam_arr**self.alpha * np.abs(np.log(lam_arr)) ** self.k
        return _like(values, lam)


def fit_power_log(
    lam: ArrayLike,
    values: ArrayLike,
    window: Tuple[float, float],
    k_candidates: Iterable[int] = DEFAULT_K_CANDIDATES,
) -> AsymptoticFit:
    """Fits ``log F = α log λ + k log|log λ| + log c`` for each candidate ``k`` and keeps the one
    with the smallest RMS residual (ties go to the smaller ``k``).

    Args:
        lam (array): positive abscissae
        values (array): positive values
        window (tuple[float, float]): window recorded in the result
        k_candidates (Iterable[int]): finite set of nonnegative log-exponents

    Returns:
        AsymptoticFit: the selected fit
    """
    lam = np.asarray(lam, dtype=float)
    values = np.asarray(values, dtype=float)
    candidates = sorted(set(int(k) for k in k_candidates))
    if not candidates or candidates[0] < 0:
        raise ValidationError("Log-exponent candidates must be nonnegative.", "Asymptotic fit")
    if np.any(values <= 0) or np.any(lam <= 0):
        raise ValidationError("Fitted values must be positive.", "Asymptotic fit")

    x = np.log(lam)
    with np.errstate(divide="ignore"):
        loglog = np.log(np.abs(x))
    design = np.column_stack([x, np.ones_like(x)])

    best = None
    residuals = {}
    for k in candidates:
        if k and not np.all(np.isfinite(loglog)):
            logger.warning("Skipping k=%s: the window contains λ=1.", k)
            continue
        target = np.log(values) - k * np.where(np.isfinite(loglog), loglog, 0.0)
        (alpha, log_c), *_ = np.linalg.lstsq(design, target, rcond=None)
        rms = float(np.sqrt(np.mean((target - design @ np.array([alpha, log_c])) ** 2)))
        residuals[k] = rms
        if best is None or rms < best[0] - 1e-12:
            best = (rms, k, float(alpha), float(math.exp(log_c)))

    rms, k, alpha, c = best
    return AsymptoticFit(alpha, k, c, rms, tuple(window), residuals, len(lam))


def asymptotic_fit(
    F: StepFunction,
    window: Tuple[float, float],
    k_candidates: Iterable[int] = DEFAULT_K_CANDIDATES,
) -> AsymptoticFit:
    """Fits ``F(λ) ~ c λ^α |ln λ|^k`` through the values of ``F`` at its atoms in a window.

    Args:
        F (StepFunction): spectral decay
        window (tuple[float, float]): ``(λ_min, λ_max)`` with ``0 < λ_min < λ_max``
        k_candidates (Iterable[int]): candidate log-exponents

    Returns:
        AsymptoticFit: the selected fit

    Raises:
        ValidationError: if the window holds fewer than 8 atoms
    """
    lo, hi = window
    if not 0 < lo < hi:
        raise ValidationError(f"Window {window} must satisfy 0 < lo < hi.", "Asymptotic fit")

    mask = F.window(lo, hi)
    if mask.sum() < 8:
        raise ValidationError(
            f"Window {window} contains {int(mask.sum())} atoms; at least 8 are required.",
            "Asymptotic fit",
        )
    return fit_power_log(F.locations[mask], F.cumulative[mask], (lo, hi), k_candidates)


def write_step_csv(F: StepFunction, meta: Optional[dict] = None) -> str:
    """Serializes a step function as the two-column CSV ``lambda,weight``."""
    return csv_text(meta or {}, ("lambda", "weight"), F.atoms)


def read_step_csv(text: str) -> StepFunction:
    """Parses a step function from a ``lambda,weight`` CSV document.

    Raises:
        ValidationError: if the columns are missing or the atoms are invalid
    """
    header, rows = read_csv_rows(text)
    if header[:2] != ["lambda", "weight"]:
        raise ValidationError(f"Expected columns 'lambda,weight', got {header}.", "Step CSV")
    return step_from_atoms((parse_number(r[0]), parse_number(r[1])) for r in rows)
