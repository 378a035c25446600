"""This module contains the certification harness: functional inequalities evaluated on concrete
``(instance, state)`` pairs, and the suite runner aggregating them into a
:class:`~orlicz.report.CertificationReport`.

Every check returns :class:`~orlicz.report.CheckRecord` objects. Theorem-backed records never fail
for a correct implementation; the suite fails as soon as one of them does.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .monocalc import (
    ConvexMinorant,
    OrliczProfile,
    StepFunction,
    growth_sandwich,
    h_profile,
    heat_profiles,
    inverse_target_samples,
    laplace_comparison,
    n_profile,
    nash_minorant,
    power_law_bound,
    right_inverse_increasing,
    sobolev_minorant,
)
from .report import CertificationReport, CheckRecord
from .spectral_ops import (
    OperatorInstance,
    SpectralDecomposition,
    decompose,
    distinct_eigenvalues,
    energy,
    heat_norms,
    project_off_kernel,
    resolvent_projector_norm,
    spectral_density,
    ultra_norm,
)
from .validator import NumericalError, ValidationError

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-12
"""float: Entries below ``SUPPORT_TOL * ‖f‖_∞`` are outside the support."""

ORTHOGONALITY_TOL = 1e-9
UNCERTAINTY_POINTS = 1000

STATE_CHECKS = (
    "h_sobolev",
    "n_sobolev",
    "nash",
    "faber_krahn",
    "uncertainty",
    "jensen_nash",
    "nash_density",
    "power_sobolev",
    "sup_bound",
)
INSTANCE_CHECKS = ("decay", "trace_norm", "resolvent", "heat", "laplace", "sandwich")
ALL_CHECKS = INSTANCE_CHECKS + STATE_CHECKS

GENERATORS = ("random", "differences", "eigen")


class TestState:
    """Nonzero function orthogonal to the kernel of an instance, with cached norms.

    Args:
        instance (OperatorInstance): the instance
        f (array): the values of the state; must be orthogonal to the kernel
        decomposition (SpectralDecomposition): decomposition of the instance, used to validate
            the orthogonality
        name (str): identifier used in reports

    Raises:
        ValidationError: if the state is zero, has the wrong shape or has a kernel component
        NumericalError: if a nonzero state has vanishing energy
    """

    __test__ = False

    def __init__(
        self,
        instance: OperatorInstance,
        f: Sequence[float],
        decomposition: Optional[SpectralDecomposition] = None,
        name: str = "state",
    ) -> None:
        f = np.array(f, dtype=float)
        if f.shape != (instance.dimension,):
            raise ValidationError(
                f"shape {f.shape} does not match dimension {instance.dimension}.", f"State {name}"
            )

        l2 = float(np.linalg.norm(f))
        if l2 == 0:
            raise ValidationError("the zero function is not admissible.", f"State {name}")
        if decomposition is not None:
            leak = float(np.linalg.norm(decomposition.kernel_vectors.T @ f))
            if leak > ORTHOGONALITY_TOL * l2:
                raise ValidationError(
                    f"kernel component {leak!r} exceeds {ORTHOGONALITY_TOL}·‖f‖.", f"State {name}"
                )

        self._energy = energy(instance, f)
        if self._energy <= 0:
            raise NumericalError(f"State {name} has zero energy off the kernel.")

        f.setflags(write=False)
        self._instance = instance
        self._f = f
        self._name = name
        self._l1 = float(np.sum(np.abs(f)))
        self._l2 = l2

    def __repr__(self) -> str:
        return f"<TestState: name={self._name}, instance={self._instance.name}>"

    @property
    def instance(self) -> OperatorInstance:
        """Returns the instance the state lives on."""
        return self._instance

    @property
    def f(self) -> np.ndarray:
        """Returns the values of the state."""
        return self._f

    @property
    def name(self) -> str:
        """Returns the identifier of the state."""
        return self._name

    @property
    def energy(self) -> float:
        """Returns ``E(f) = ⟨Af, f⟩``."""
        return self._energy

    @property
    def l1(self) -> float:
        """Returns ``‖f‖₁``."""
        return self._l1

    @property
    def l2(self) -> float:
        """Returns ``‖f‖₂``."""
        return self._l2

    @property
    def support(self) -> np.ndarray:
        """Returns the sorted indices where ``|f| > SUPPORT_TOL · ‖f‖_∞``."""
        return _support(self._f)

    def scaled(self, factor: float) -> TestState:
        """Returns the state ``c·f``."""
        return TestState(self._instance, factor * self._f, name=self._name)


def _support(values: np.ndarray) -> np.ndarray:
    magnitude = np.abs(values)
    peak = float(np.max(magnitude)) if magnitude.size else 0.0
    return np.flatnonzero(magnitude > SUPPORT_TOL * peak) if peak > 0 else np.zeros(0, int)


@dataclass(frozen=True)
class SupportDomain:
    """Finite domain ``Ω`` under the counting measure."""

    points: Tuple[int, ...]

    @property
    def measure(self) -> int:
        """Returns ``μ(Ω)``."""
        return len(self.points)


def support_domain(state: TestState) -> SupportDomain:
    """Returns the smallest admissible domain ``Ω = supp(f) ∪ supp(Af)``."""
    image = state.instance.matrix @ state.f
    points = np.union1d(state.support, _support(image))
    return SupportDomain(tuple(int(p) for p in points))


def validate_minorant(minorant: ConvexMinorant, F: StepFunction) -> None:
    """Validates that ``0 <= φ(y) <= y F⁻¹(y)`` on the interval of the minorant.

    The target is linear between the corners returned by
    :func:`~orlicz.monocalc.inverse_target_samples`, so checking the convex minorant at the
    corners suffices.

    Raises:
        ValidationError: if the minorant is negative, leaves ``[0, F_max]`` or exceeds the target
    """
    issues = []
    lo, hi = minorant.interval
    if lo < 0 or hi > F.total_mass * (1 + 1e-12):
        issues.append(f"Interval [{lo}, {hi}] is not inside [0, {F.total_mass}].")
    if np.any(minorant.values < 0):
        issues.append("Minorant values must be nonnegative.")
    if len(F) and not minorant.is_below(inverse_target_samples(F), tol=1e-12):
        issues.append("Minorant exceeds y·F⁻¹(y).")
    if issues:
        raise ValidationError(issues, subject="Convex minorant")


def _minorant_at(minorant: ConvexMinorant, y: float) -> float:
    """Evaluates a minorant extended by ``+inf`` beyond its interval."""
    lo, hi = minorant.interval
    if y > hi * (1 + 1e-12) + 1e-300:
        return math.inf
    return float(minorant(min(max(y, lo), hi)))


def uncertainty_constant(
    F: StepFunction, minorant: ConvexMinorant, points: int = UNCERTAINTY_POINTS
) -> float:
    """Returns the grid infimum of ``φ(y) / (y F⁻¹(y))`` over ``(0, F_max)``.

    The grid holds ``points`` log-spaced levels together with the jump values of ``F``, where the
    ratio attains its minima for the largest convex minorant.
    """
    if F.is_empty:
        return 0.0

    top = min(F.total_mass, minorant.interval[1])
    ys = np.union1d(np.geomspace(top * 1e-6, top, points), F.cumulative)
    ys = ys[(ys > 0) & (ys <= top)]
    target = ys * np.asarray(right_inverse_increasing(F, ys))
    usable = np.isfinite(target) & (target > 0)
    if not np.any(usable):
        return 0.0
    ratios = np.asarray(minorant(ys[usable])) / target[usable]
    return float(max(np.min(ratios), 0.0))


def check_h_sobolev(state: TestState, profile: OrliczProfile) -> CheckRecord:
    """Checks ``Σ_x H(|f(x)|² / 4E(f)) <= 1``.

    Raises:
        NumericalError: if an argument reaches the infinite branch of ``H``
    """
    levels = state.f[state.support] ** 2 / (4.0 * state.energy)
    values = np.asarray(h_profile(profile, levels))
    if not np.all(np.isfinite(values)):
        raise NumericalError(
            f"H-profile sentinel reached on state {state.name}: max level {levels.max()!r} >= "
            f"G_max {profile.m_zero!r}."
        )
    return CheckRecord("h_sobolev", float(np.sum(values)), 1.0, "<=", provenance="H<-G(F)")


def check_n_sobolev(state: TestState, profile: OrliczProfile) -> CheckRecord:
    """Checks ``Σ_x N(|f(x)|² / 4E(f)) <= ln 2``.

    Raises:
        NumericalError: if an argument is not below ``M̂(0)``
    """
    levels = state.f[state.support] ** 2 / (4.0 * state.energy)
    if np.any(levels >= profile.m_zero):
        raise NumericalError(
            f"N-profile sentinel reached on state {state.name}: max level {levels.max()!r} >= "
            f"M(0) {profile.m_zero!r}."
        )
    lhs = float(np.sum(n_profile(profile, levels)))
    return CheckRecord("n_sobolev", lhs, math.log(2.0), "<=", provenance="N<-M(F)")


def check_nash(
    state: TestState, F: StepFunction, minorant: ConvexMinorant
) -> Tuple[CheckRecord, CheckRecord]:
    """Checks the two Nash-type inequalities

    .. code-block:: text

        Σ_x |f(x)|² F⁻¹(|f(x)| / 2‖f‖₁)   <= 4E(f)
        ‖f‖₁² φ(‖f‖₂² / 2‖f‖₁²)           <= 2E(f)

    Raises:
        ValidationError: if ``φ`` is not an admissible minorant of ``y F⁻¹(y)``
    """
    validate_minorant(minorant, F)

    f = state.f[state.support]
    inverse = np.asarray(right_inverse_increasing(F, np.abs(f) / (2.0 * state.l1)))
    lhs_a = float(np.sum(f**2 * inverse))
    record_a = CheckRecord("nash_A", lhs_a, 4.0 * state.energy, "<=", provenance="F^-1")

    y = state.l2**2 / (2.0 * state.l1**2)
    lhs_b = state.l1**2 * _minorant_at(minorant, y)
    record_b = CheckRecord(
        "nash_B", lhs_b, 2.0 * state.energy, "<=", param=f"y={y!r}", provenance="phi"
    )
    return record_a, record_b


def check_faber_krahn(state: TestState, F: StepFunction, minorant: ConvexMinorant) -> CheckRecord:
    """Checks ``μ(Ω) φ(1 / 2μ(Ω)) <= 2E(f) / ‖f‖₂²`` with ``Ω = supp(f) ∪ supp(Af)``.

    A domain covering the whole space gives a vacuous record.
    """
    validate_minorant(minorant, F)

    domain = support_domain(state)
    mu = domain.measure
    if mu >= state.instance.dimension:
        return CheckRecord.skipped(
            "faber_krahn", "vacuous", "the domain is the whole space", param=f"mu={mu}"
        )

    lhs = mu * _minorant_at(minorant, 1.0 / (2.0 * mu))
    rhs = 2.0 * state.energy / state.l2**2
    return CheckRecord("faber_krahn", lhs, rhs, "<=", param=f"mu={mu}", provenance="phi")


def check_uncertainty(
    state: TestState,
    F: StepFunction,
    minorant: ConvexMinorant,
    constant: Optional[float] = None,
) -> CheckRecord:
    """Checks ``2μ(Ω) F(4λ / C) >= 1`` with ``λ = E(f) / ‖f‖₂²`` and ``φ >= C y F⁻¹(y)``.

    Args:
        state (TestState): the state
        F (StepFunction): the spectral decay
        minorant (ConvexMinorant): the convex minorant
        constant (float): the constant ``C``; computed by :func:`uncertainty_constant` if omitted

    Returns:
        CheckRecord: the record, refused when ``C = 0``
    """
    validate_minorant(minorant, F)

    constant = uncertainty_constant(F, minorant) if constant is None else constant
    if constant <= 0:
        return CheckRecord.skipped(
            "uncertainty", "refused", "the minorant vanishes relative to y·F⁻¹(y) (C = 0)"
        )

    mu = support_domain(state).measure
    lam = state.energy / state.l2**2
    lhs = 2.0 * mu * float(F(4.0 * lam / constant))
    param = f"C={constant!r} lambda={lam!r} mu={mu}"
    return CheckRecord("uncertainty", lhs, 1.0, ">=", param=param, provenance="F,phi")


def check_jensen_nash(
    state: TestState,
    profile: OrliczProfile,
    route: str = "h",
    minorant: Optional[ConvexMinorant] = None,
) -> CheckRecord:
    """Checks the Nash inequality obtained from the Sobolev-Orlicz inequality by Jensen:

    .. code-block:: text

        φ(‖f‖₂² / 2E^{1/2}‖f‖₁) <= 2E^{1/2} / ‖f‖₁          (route "h", φ <= s G⁻¹(s²))
        φ(‖f‖₂² / 2E^{1/2}‖f‖₁) <= 2 ln 2 · E^{1/2} / ‖f‖₁  (route "n", φ <= s / M̂⁻¹(s²))
    """
    minorant = minorant or sobolev_minorant(profile, route)
    root = math.sqrt(state.energy)
    s = state.l2**2 / (2.0 * root * state.l1)
    bound = 2.0 * root / state.l1
    if route == "n":
        bound *= math.log(2.0)
    return CheckRecord(
        f"jensen_nash_{route}",
        _minorant_at(minorant, s),
        bound,
        "<=",
        param=f"s={s!r}",
        provenance=f"phi<-{route.upper()}",
    )


def check_nash_density(
    state: TestState,
    F: StepFunction,
    minorant: ConvexMinorant,
    constant: Optional[float] = None,
) -> CheckRecord:
    """Checks the density form of the Nash inequality ``‖f‖₂² / 2‖f‖₁² <= F(4E(f) / C‖f‖₂²)``."""
    validate_minorant(minorant, F)

    constant = uncertainty_constant(F, minorant) if constant is None else constant
    if constant <= 0:
        return CheckRecord.skipped("nash_density", "refused", "C = 0")

    level = 4.0 * state.energy / (constant * state.l2**2)
    lhs = state.l2**2 / (2.0 * state.l1**2)
    return CheckRecord(
        "nash_density", lhs, float(F(level)), "<=", param=f"C={constant!r}", provenance="F,phi"
    )


def check_power_sobolev(state: TestState, F: StepFunction, alpha: float) -> CheckRecord:
    """Checks the polynomial Sobolev inequality ``‖f‖_q <= 2 C₁^{1/2α} E(f)^{1/2}`` with
    ``q = 2α / (α - 1)``, implied by ``F(λ) <= Cλ^α``."""
    _, c_one = power_law_bound(F, alpha)
    q = 2.0 * alpha / (alpha - 1.0)
    lhs = float(np.sum(np.abs(state.f) ** q) ** (1.0 / q))
    rhs = 2.0 * c_one ** (1.0 / (2.0 * alpha)) * math.sqrt(state.energy)
    return CheckRecord(
        "power_sobolev", lhs, rhs, "<=", param=f"alpha={alpha!r} C1={c_one!r}", provenance="F"
    )


def check_sup_bound(state: TestState, profile: OrliczProfile) -> CheckRecord:
    """Checks ``max_x |f(x)|² <= G(λ_max) E(f)``, which keeps the H and N arguments below their
    infinite branches."""
    lhs = float(np.max(state.f**2))
    return CheckRecord("sup_bound", lhs, profile.m_zero * state.energy, "<=", provenance="G")


@dataclass(frozen=True)
class SuiteOptions:
    """Options of a certification suite.

    Args:
        states (int): states drawn per generator and instance
        generators (tuple[str, ...]): state generators, see :data:`GENERATORS`
        checks (tuple[str, ...]): enabled checks, see :data:`ALL_CHECKS`
        density_scale (float): factor applied to every atom weight of ``F``
        epsilon (float): growth parameter of the sandwich
        alpha (float): exponent of the polynomial Sobolev check
        t_grid (tuple[float, ...]): heat times of the instance-level checks
        grid_points (int): number of spectral levels of the resolvent check
    """

    states: int = 100
    generators: Tuple[str, ...] = ("random",)
    checks: Tuple[str, ...] = ALL_CHECKS
    density_scale: float = 1.0
    epsilon: float = 1.0
    alpha: float = 2.0
    t_grid: Tuple[float, ...] = field(
        default_factory=lambda: tuple(np.geomspace(1e-2, 1e2, 20).tolist())
    )
    grid_points: int = 20

    def __post_init__(self):
        issues = []
        if self.states < 0:
            issues.append(f"State count {self.states} must be nonnegative.")
        unknown = set(self.generators) - set(GENERATORS)
        if unknown:
            issues.append(f"Unknown generators {sorted(unknown)}; expected {GENERATORS}.")
        unknown = set(self.checks) - set(ALL_CHECKS)
        if unknown:
            issues.append(f"Unknown checks {sorted(unknown)}; expected {ALL_CHECKS}.")
        if not self.density_scale > 0:
            issues.append("Density scale must be positive.")
        if not self.epsilon > 0:
            issues.append("Growth parameter must be positive.")
        if not self.alpha > 1:
            issues.append("Power-law exponent must be greater than 1.")
        if not self.t_grid or any(t <= 0 for t in self.t_grid):
            issues.append("Heat times must be positive.")
        if issues:
            raise ValidationError(issues, subject="Suite options")


@dataclass
class _Context:
    """Spectral data of one instance shared by all its checks."""

    instance: OperatorInstance
    decomposition: SpectralDecomposition
    F: StepFunction
    profile: OrliczProfile
    minorant: ConvexMinorant
    constant: float
    jensen: Dict[str, ConvexMinorant] = field(default_factory=dict)


def random_states(
    context: _Context, count: int, rng: np.random.Generator
) -> List[Tuple[str, np.ndarray]]:
    """Gaussian vectors projected off the kernel."""
    draws = rng.standard_normal((count, context.instance.dimension))
    return [
        (f"random-{i}", project_off_kernel(context.decomposition, v)) for i, v in enumerate(draws)
    ]


def difference_states(
    context: _Context, count: int, rng: np.random.Generator
) -> List[Tuple[str, np.ndarray]]:
    """Point differences ``δ_x - δ_y``, projected off the kernel."""
    dimension = context.instance.dimension
    states = []
    for _ in range(count):
        x, y = rng.choice(dimension, size=2, replace=False)
        f = np.zeros(dimension)
        f[x], f[y] = 1.0, -1.0
        states.append((f"diff-{x}-{y}", project_off_kernel(context.decomposition, f)))
    return states


def eigen_states(
    context: _Context, count: int, rng: np.random.Generator
) -> List[Tuple[str, np.ndarray]]:
    """The lowest positive eigenvectors and the top one."""
    decomposition = context.decomposition
    positive = np.flatnonzero(decomposition.positive_mask)
    chosen = list(positive[: max(count - 1, 0)])
    if len(positive) and positive[-1] not in chosen and count:
        chosen.append(positive[-1])
    return [(f"eigen-{i}", decomposition.eigenvectors[:, i]) for i in chosen]


_GENERATOR_FUNCTIONS: Dict[str, Callable] = {
    "random": random_states,
    "differences": difference_states,
    "eigen": eigen_states,
}


def _state_records(state: TestState, context: _Context, checks: Sequence[str], alpha: float):
    """Evaluates the enabled state checks in a fixed order."""
    F, profile, minorant = context.F, context.profile, context.minorant
    records: List[CheckRecord] = []
    if "h_sobolev" in checks:
        records.append(check_h_sobolev(state, profile))
    if "n_sobolev" in checks:
        records.append(check_n_sobolev(state, profile))
    if "nash" in checks:
        records.extend(check_nash(state, F, minorant))
    if "faber_krahn" in checks:
        records.append(check_faber_krahn(state, F, minorant))
    if "uncertainty" in checks:
        records.append(check_uncertainty(state, F, minorant, context.constant))
    if "jensen_nash" in checks:
        for route in ("h", "n"):
            records.append(check_jensen_nash(state, profile, route, context.jensen[route]))
    if "nash_density" in checks:
        records.append(check_nash_density(state, F, minorant, context.constant))
    if "power_sobolev" in checks:
        records.append(check_power_sobolev(state, F, alpha))
    if "sup_bound" in checks:
        records.append(check_sup_bound(state, profile))
    return [r.with_context(context.instance.name, state.name) for r in records]


def _cumulative_norms(
    decomposition: SpectralDecomposition, reps: np.ndarray, counts: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Returns ``ultra_norm(Π_λ)`` and ``trace(Π_λ)`` at every distinct positive eigenvalue."""
    vectors = decomposition.eigenvectors[:, decomposition.positive_mask]
    cumulative = np.zeros((decomposition.dimension,) * 2)
    norms, traces = np.zeros(len(reps)), np.zeros(len(reps))
    start = 0
    for i, count in enumerate(counts):
        q = vectors[:, start : start + count]
        cumulative += q @ q.T
        norms[i] = ultra_norm(cumulative)
        traces[i] = np.trace(cumulative)
        start += count
    return norms, traces


def instance_records(context: _Context, options: SuiteOptions) -> List[CheckRecord]:
    """Evaluates the instance-level checks: consistency of ``F`` with the spectral projectors,
    the resolvent and heat bounds, the Laplace comparisons and the growth sandwich."""
    instance, decomposition = context.instance, context.decomposition
    F, profile, checks = context.F, context.profile, options.checks
    records: List[CheckRecord] = []

    reps, counts = distinct_eigenvalues(decomposition)
    if "decay" in checks or "trace_norm" in checks:
        norms, traces = _cumulative_norms(decomposition, reps, counts)
        for lam, norm, trace in zip(reps, norms, traces):
            param = f"lambda={lam!r}"
            if "decay" in checks:
                records.append(CheckRecord("decay", norm, float(F(lam)), "<=", param))
            if "trace_norm" in checks and instance.invariant and instance.fiber == 1:
                tau = trace / instance.group_size
                records.append(CheckRecord("trace_norm", norm, tau, "==", param))

    if "resolvent" in checks and len(reps):
        picks = np.unique(np.linspace(0, len(reps) - 1, options.grid_points).round().astype(int))
        for lam in reps[picks]:
            lhs = resolvent_projector_norm(decomposition, lam)
            records.append(
                CheckRecord("resolvent", lhs, float(profile.g(lam)), "<=", f"lambda={lam!r}")
            )

    if "heat" in checks or "laplace" in checks:
        measured = np.array([heat_norms(decomposition, t) for t in options.t_grid])
        if "heat" in checks:
            m_hat = np.atleast_1d(heat_profiles(profile, options.t_grid)[1])
            for t, (_, m_value), bound in zip(options.t_grid, measured, m_hat):
                records.append(CheckRecord("heat", m_value, float(bound), "<=", f"t={t!r}"))
        if "laplace" in checks:
            comparison = laplace_comparison(
                profile,
                options.t_grid,
                n=instance.fiber,
                measured=(measured[:, 0], measured[:, 1]),
                invariant=instance.invariant,
            )
            records.extend(comparison.records)

    if "sandwich" in checks:
        records.extend(growth_sandwich(F, options.epsilon).records)

    return [r.with_context(instance.name) for r in records]


def build_context(
    instance: OperatorInstance, density_scale: float = 1.0, jobs: int = 1
) -> _Context:
    """Decomposes an instance and builds the profiles and minorants used by the checks.

    Args:
        instance (OperatorInstance): instance with a dense matrix
        density_scale (float): factor applied to every atom weight of ``F``
        jobs (int): worker threads
    """
    decomposition = decompose(instance)
    F = spectral_density(instance, decomposition, jobs=jobs)
    if density_scale != 1.0:
        logger.warning("Scaling the spectral decay of %s by %s.", instance.name, density_scale)
        F = F.scaled(density_scale)

    profile = OrliczProfile(F)
    minorant = nash_minorant(F)
    context = _Context(
        instance, decomposition, F, profile, minorant, uncertainty_constant(F, minorant)
    )
    if not F.is_empty:
        context.jensen = {route: sobolev_minorant(profile, route) for route in ("h", "n")}
    return context


def run_suite(
    instances: Iterable[OperatorInstance],
    generators: Optional[Sequence[str]] = None,
    checks: Optional[Sequence[str]] = None,
    seed: Optional[int] = None,
    options: Optional[SuiteOptions] = None,
    jobs: int = 1,
) -> CertificationReport:
    """Runs the enabled checks on every instance and on generated states.

    Records are ordered by instance, then state (instance-level records first), then check.
    Randomness flows from ``seed`` through one spawned stream per instance, so the report only
    depends on ``(instances, options, seed)``.

    Args:
        instances (Iterable[OperatorInstance]): instances with dense matrices
        generators (Sequence[str]): state generators; overrides ``options.generators``
        checks (Sequence[str]): enabled checks; overrides ``options.checks``
        seed (int): master seed
        options (SuiteOptions): suite options
        jobs (int): worker threads used over states

    Returns:
        CertificationReport: all records
    """
    options = options or SuiteOptions()
    if generators is not None or checks is not None:
        options = replace(
            options,
            generators=tuple(generators or options.generators),
            checks=tuple(checks or options.checks),
        )

    instances = list(instances)
    report = CertificationReport(seed=seed)
    streams = np.random.SeedSequence(seed).spawn(len(instances))
    for instance, stream in zip(instances, streams):
        if options.states == 0:
            logger.info("No states requested; skipping %s.", instance.name)
            continue
        if instance.matrix is None:
            report.add(
                CheckRecord.skipped(
                    "suite", "refused", "no dense matrix", instance=instance.name
                )
            )
            continue

        context = build_context(instance, options.density_scale, jobs)
        if context.F.is_empty:
            report.add(
                CheckRecord.skipped("suite", "vacuous", "empty spectrum", instance=instance.name)
            )
            continue

        report.add(*instance_records(context, options))

        rng = np.random.default_rng(stream)
        candidates = []
        for name in options.generators:
            candidates.extend(_GENERATOR_FUNCTIONS[name](context, options.states, rng))

        states = []
        for name, f in candidates:
            if np.linalg.norm(f) <= SUPPORT_TOL:
                logger.debug("Skipping state %s: it lies in the kernel.", name)
                continue
            states.append(TestState(instance, f, context.decomposition, name))

        state_checks = [c for c in options.checks if c in STATE_CHECKS]

        def evaluate(state: TestState) -> List[CheckRecord]:
            return _state_records(state, context, state_checks, options.alpha)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(evaluate, states))
        else:
            results = [evaluate(s) for s in states]
        for records in results:
            report.add(*records)

        logger.info("Certified %s on %d states.", instance.name, len(states))

    logger.info("Suite finished: %d records, %d failures.", len(report), len(report.failures))
    return report
