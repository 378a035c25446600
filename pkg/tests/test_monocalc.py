"""Unit tests for the monocalc module"""

import math

import numpy as np
import pytest

from orlicz.complexes import cover_instance, torus_cover
from orlicz.monocalc import (
    ConvexMinorant,
    OrliczProfile,
    StepFunction,
    asymptotic_fit,
    convex_minorant,
    g_transform,
    growth_sandwich,
    h_profile,
    heat_profiles,
    inverse_target_samples,
    laplace_comparison,
    m_inverse,
    n_profile,
    nash_minorant,
    power_law_bound,
    read_step_csv,
    right_inverse_increasing,
    sobolev_minorant,
    staircase_samples,
    step_from_atoms,
    step_from_values,
    write_step_csv,
)
from orlicz.spectral_ops import (
    cycle_instance,
    decompose,
    heat_norms,
    spectral_density,
    torus_instance,
)
from orlicz.validator import ConfigurationError, ValidationError


@pytest.fixture
def cycle_decay():
    """Spectral decay of the Laplacian on the cycle with four vertices."""
    return StepFunction([2.0, 4.0], [0.5, 0.25])


@pytest.fixture
def cycle_profile(cycle_decay):
    """Orlicz profile of the four-cycle."""
    return OrliczProfile(cycle_decay)


class TestStepFunction:
    """Unit tests for the StepFunction class."""

    def test_evaluation(self, cycle_decay):
        """Tests that a step function is right-continuous with the correct values."""
        assert cycle_decay(1.0) == 0
        assert cycle_decay(2.0) == 0.5
        assert cycle_decay(3.9) == 0.5
        assert cycle_decay(4.0) == 0.75
        assert cycle_decay.left_limit(4.0) == 0.5
        np.testing.assert_allclose(cycle_decay([0.5, 2.0, 10.0]), [0.0, 0.5, 0.75])

    def test_properties(self, cycle_decay):
        """Tests the read-only properties of a step function."""
        assert len(cycle_decay) == 2
        assert cycle_decay.atoms == [(2.0, 0.5), (4.0, 0.25)]
        assert cycle_decay.total_mass == 0.75
        assert not cycle_decay.is_empty
        np.testing.assert_allclose(cycle_decay.cumulative, [0.5, 0.75])

        with pytest.raises(ValueError):
            cycle_decay.locations[0] = 1.0

    def test_empty(self):
        """Tests that the empty step function vanishes identically."""
        F = StepFunction()
        assert F.is_empty
        assert F.total_mass == 0
        assert F(5.0) == 0

    @pytest.mark.parametrize(
        "locations, weights, match",
        [
            ([1.0, 2.0], [1.0], r"2 locations but 1 weights were given"),
            ([0.0, 2.0], [1.0, 1.0], r"Atom locations must be strictly positive"),
            ([1.0, 2.0], [1.0, -1.0], r"Atom weights must be strictly positive"),
            ([2.0, 1.0], [1.0, 1.0], r"Atom locations must be strictly increasing"),
            ([1.0, math.inf], [1.0, 1.0], r"Atoms must be finite"),
        ],
    )
    def test_invalid_atoms(self, locations, weights, match):
        """Tests that invalid atoms raise a validation error."""
        with pytest.raises(ValidationError, match=match):
            StepFunction(locations, weights)

    def test_step_from_atoms_merges_duplicates(self):
        """Tests that duplicated locations are merged by summing their weights."""
        F = step_from_atoms([(4.0, 0.25), (2.0, 0.25), (2.0, 0.25)])
        assert F == StepFunction([2.0, 4.0], [0.5, 0.25])

    def test_step_from_values(self):
        """Tests that locations without an increase are dropped."""
        F = step_from_values([1.0, 2.0, 3.0], [0.5, 0.5, 1.5])
        assert F.atoms == [(1.0, 0.5), (3.0, 1.0)]

        with pytest.raises(ValidationError, match=r"nondecreasing"):
            step_from_values([1.0, 2.0], [1.0, 0.5])

    def test_scaled(self, cycle_decay):
        """Tests that scaling multiplies every weight."""
        assert cycle_decay.scaled(0.5).atoms == [(2.0, 0.25), (4.0, 0.125)]
        with pytest.raises(ValidationError, match=r"must be positive"):
            cycle_decay.scaled(0.0)

    def test_csv_round_trip(self, cycle_decay):
        """Tests that a step function survives serialization."""
        text = write_step_csv(cycle_decay, {"seed": 3})
        assert text.splitlines()[:3] == ["# seed=3", "lambda,weight", "2.0,0.5"]
        assert read_step_csv(text) == cycle_decay

    def test_csv_wrong_columns(self):
        """Tests that a CSV document with other columns is rejected."""
        with pytest.raises(ValidationError, match=r"Expected columns 'lambda,weight'"):
            read_step_csv("lambda,F\n1.0,2.0\n")


class TestInverse:
    """Tests for the right-continuous inverse."""

    @pytest.mark.parametrize(
        "y, expected", [(0.0, 2.0), (0.1, 2.0), (0.5, 4.0), (0.6, 4.0), (0.75, math.inf)]
    )
    def test_right_inverse(self, cycle_decay, y, expected):
        """Tests the inverse on both sides of every jump."""
        assert right_inverse_increasing(cycle_decay, y) == expected

    def test_empty_inverse(self):
        """Tests that the inverse of the empty function is infinite."""
        assert right_inverse_increasing(StepFunction(), 0.1) == math.inf

    def test_negative_level(self, cycle_decay):
        """Tests that negative levels are rejected."""
        with pytest.raises(ValidationError, match=r"Inverse levels must be nonnegative"):
            right_inverse_increasing(cycle_decay, -1.0)


class TestOrliczProfiles:
    """Tests for the functions G, H, L̂, M̂ and N."""

    def test_g_transform(self, cycle_decay):
        """Tests that G divides each weight by its location."""
        G = g_transform(cycle_decay)
        assert G.atoms == [(2.0, 0.25), (4.0, 0.0625)]
        assert G(4.0) == pytest.approx(0.3125)

    def test_h_profile(self, cycle_profile):
        """Tests the values of H below and above the jumps of G."""
        assert h_profile(cycle_profile, 0.0) == 0
        assert h_profile(cycle_profile, 0.125) == pytest.approx(0.25)
        assert h_profile(cycle_profile, 0.25) == pytest.approx(1.0)
        assert h_profile(cycle_profile, 0.3125) == math.inf

    def test_heat_profiles_at_zero(self, cycle_profile):
        """Tests that the heat profiles start at the total masses of F and G."""
        l_hat, m_hat = heat_profiles(cycle_profile, 0.0)
        assert l_hat == pytest.approx(0.75)
        assert m_hat == pytest.approx(0.3125)
        assert cycle_profile.m_zero == pytest.approx(0.3125)

    def test_heat_profiles_closed_form(self, cycle_profile):
        """Tests the heat profiles against their closed form."""
        t = np.array([0.1, 1.0, 3.0])
        l_hat, m_hat = heat_profiles(cycle_profile, t)
        np.testing.assert_allclose(l_hat, 0.5 * np.exp(-2 * t) + 0.25 * np.exp(-4 * t))
        np.testing.assert_allclose(m_hat, 0.25 * np.exp(-2 * t) + 0.0625 * np.exp(-4 * t))

    def test_negative_time(self, cycle_profile):
        """Tests that negative times are rejected."""
        with pytest.raises(ValidationError, match=r"Heat times must be nonnegative"):
            heat_profiles(cycle_profile, -0.5)

    @pytest.mark.parametrize("y", [0.01, 0.1, 0.2, 0.3])
    def test_m_inverse(self, cycle_profile, y):
        """Tests that the inverse of M̂ solves M̂(t) = y."""
        t = m_inverse(cycle_profile, y)
        assert heat_profiles(cycle_profile, t)[1] == pytest.approx(y, abs=1e-10)
        assert n_profile(cycle_profile, y) == pytest.approx(y / t)

    def test_m_inverse_branches(self, cycle_profile):
        """Tests the inverse of M̂ at zero and beyond M̂(0)."""
        assert m_inverse(cycle_profile, 0.0) == math.inf
        assert m_inverse(cycle_profile, 0.3125) == 0
        assert n_profile(cycle_profile, 0.5) == math.inf

    def test_n_profile_nonpositive(self, cycle_profile):
        """Tests that N is only evaluated at positive levels."""
        with pytest.raises(ValidationError, match=r"N-profile levels must be positive"):
            n_profile(cycle_profile, 0.0)

    @pytest.mark.parametrize("lam", [0.3, 1.0, 2.0, 7.0])
    def test_m_inverse_single_atom(self, lam):
        """Tests the inverse of M̂ when all of the mass of G sits at one eigenvalue."""
        profile = OrliczProfile(step_from_atoms([(lam, 1.0)]))
        ys = np.linspace(1e-6, 0.999, 400) / lam
        expected = np.log(1 / (lam * ys)) / lam
        np.testing.assert_allclose(m_inverse(profile, ys), expected, rtol=1e-9)
        np.testing.assert_allclose(n_profile(profile, ys), ys / expected, rtol=1e-9)

    def test_empty_profile(self):
        """Tests that the profiles of an empty spectrum vanish."""
        profile = OrliczProfile(StepFunction())
        assert h_profile(profile, 0.1) == 0
        assert n_profile(profile, 0.1) == 0
        np.testing.assert_array_equal(h_profile(profile, [0.0, 1.0, 5.0]), [0.0, 0.0, 0.0])
        assert heat_profiles(profile, 1.0) == (0.0, 0.0)

    def test_invalid_tolerance(self, cycle_decay):
        """Tests that the evaluation tolerance must be positive."""
        with pytest.raises(ValidationError, match=r"Evaluation tolerance must be positive"):
            OrliczProfile(cycle_decay, tolerance=0.0)


class TestConvexMinorant:
    """Tests for the convex minorants."""

    def test_lower_hull(self):
        """Tests that points above the hull are dropped."""
        minorant = convex_minorant([(1.0, 1.0), (2.0, 0.5), (3.0, 2.0)])
        assert minorant.breakpoints == [(0.0, 0.0), (2.0, 0.5), (3.0, 2.0)]
        np.testing.assert_allclose(minorant.slopes, [0.25, 1.5])

    def test_unanchored(self):
        """Tests that an unanchored hull starts at the first sample."""
        minorant = convex_minorant([(1.0, 1.0), (2.0, 0.5), (3.0, 2.0)], anchor=False)
        assert minorant.breakpoints == [(1.0, 1.0), (2.0, 0.5), (3.0, 2.0)]
        assert minorant.interval == (1.0, 3.0)

    def test_duplicate_abscissae_keep_smallest(self):
        """Tests that samples sharing an abscissa keep the smallest value."""
        minorant = convex_minorant([(1.0, 3.0), (1.0, 1.0), (2.0, 4.0)])
        assert minorant(1.0) == pytest.approx(1.0)

    def test_interval_filter(self):
        """Tests that samples outside the interval are ignored."""
        samples = [(1.0, 1.0), (2.0, 2.0), (5.0, 0.0)]
        minorant = convex_minorant(samples, interval=(0.0, 2.0))
        assert minorant.interval == (0.0, 2.0)

    @pytest.mark.parametrize(
        "samples, match",
        [
            ([(1.0, 1.0)], r"At least two samples are required, got 1"),
            ([(1.0, -1.0), (2.0, 1.0)], r"Sample values must be nonnegative"),
            ([(1.0, math.nan), (2.0, 1.0)], r"Samples must be finite"),
        ],
    )
    def test_invalid_samples(self, samples, match):
        """Tests that invalid samples raise a validation error."""
        with pytest.raises(ValidationError, match=match):
            convex_minorant(samples)

    def test_non_convex_breakpoints(self):
        """Tests that decreasing slopes are rejected."""
        with pytest.raises(ValidationError, match=r"Slopes must be nondecreasing"):
            ConvexMinorant([0.0, 1.0, 2.0], [0.0, 2.0, 3.0])

    def test_outside_interval(self):
        """Tests that a minorant cannot be evaluated outside its interval."""
        minorant = ConvexMinorant([0.0, 1.0], [0.0, 1.0])
        assert minorant.contains(0.5)
        with pytest.raises(ValidationError, match=r"outside the minorant interval"):
            minorant(2.0)

    def test_nash_minorant(self, cycle_decay):
        """Tests the exact corners of the Nash minorant of the four-cycle."""
        minorant = nash_minorant(cycle_decay)
        assert minorant.breakpoints == [(0.0, 0.0), (0.5, 1.0), (0.75, 3.0)]
        assert minorant.is_below(inverse_target_samples(cycle_decay))

    def test_sobolev_minorant_h_route(self, cycle_profile):
        """Tests that the H-route minorant ends at the square root of the mass of G."""
        minorant = sobolev_minorant(cycle_profile, "h")
        assert minorant.interval[1] == pytest.approx(math.sqrt(0.3125))
        assert minorant(0.5) == pytest.approx(1.0)

    def test_sobolev_minorant_n_route(self, cycle_profile):
        """Tests that the N-route minorant lies below the sampled target."""
        minorant = sobolev_minorant(cycle_profile, "n", grid_size=50)
        s_max = 0.75 * math.sqrt(0.3125)
        assert minorant.interval[1] == pytest.approx(s_max)

        ys = np.linspace(s_max / 10, s_max, 7)
        targets = ys / np.asarray(m_inverse(cycle_profile, ys**2))
        assert np.all(minorant(ys) <= targets + 1e-12)

    def test_unknown_route(self, cycle_profile):
        """Tests that an unknown route is rejected."""
        with pytest.raises(ValidationError, match=r"Route 'x' must be 'h' or 'n'"):
            sobolev_minorant(cycle_profile, "x")

    def test_staircase(self):
        """Tests that the staircase stays below a nondecreasing target."""
        stairs = staircase_samples([1.0, 2.0, 3.0], [1.0, 4.0, 9.0])
        assert stairs.tolist() == [
            [0.0, 0.0],
            [1.0, 0.0],
            [2.0, 1.0],
            [3.0, 4.0],
            [1.0, 1.0],
            [2.0, 4.0],
            [3.0, 9.0],
        ]


class TestDecayBounds:
    """Tests for the polynomial bounds, the growth sandwich and the Laplace comparison."""

    def test_power_law_bound(self, cycle_decay):
        """Tests the smallest polynomial constants of the four-cycle."""
        c, c_1 = power_law_bound(cycle_decay, 2.0)
        assert c == pytest.approx(0.125)
        assert c_1 == pytest.approx(0.25)

        with pytest.raises(ValidationError, match=r"Exponent 1.0 must be greater than 1"):
            power_law_bound(cycle_decay, 1.0)

    def test_sandwich_quadratic(self):
        """Tests that a quadratic decay satisfies the growing condition and the sandwich."""
        lam = np.arange(1.0, 65.0)
        report = growth_sandwich(step_from_values(lam, lam**2), epsilon=1.0)
        assert report.condition_holds
        assert report.sandwich_verified
        assert any(r.check == "sandwich_upper" for r in report.records)

    def test_sandwich_linear(self):
        """Tests that a linear decay fails the growing condition."""
        lam = np.arange(1.0, 65.0)
        report = growth_sandwich(step_from_values(lam, lam), epsilon=1.0)
        assert not report.condition_holds
        upper = [r.param for r in report.records if r.check == "sandwich_upper"]
        assert upper == ["lambda=1.0"]
        assert all(r.passed for r in report.records if r.check == "sandwich_lower")

    def test_sandwich_invalid_epsilon(self, cycle_decay):
        """Tests that the growth parameter must be positive."""
        with pytest.raises(ValidationError, match=r"Growth parameter 0 must be positive"):
            growth_sandwich(cycle_decay, 0)

    def test_laplace_comparison(self, cycle_profile):
        """Tests that the Laplace comparison passes with exact heat norms."""
        t = [0.1, 1.0, 10.0]
        measured = heat_profiles(cycle_profile, t)
        report = laplace_comparison(cycle_profile, t, measured=measured, invariant=True)

        assert report.passed
        assert len(report.select("laplace_L")) == 3
        assert len(report.select("laplace_M_reverse")) == 3
        assert len(report.select("laplace_G")) == 2

    def test_laplace_requires_measured(self, cycle_profile):
        """Tests that invariant comparisons need measured norms."""
        with pytest.raises(ConfigurationError, match=r"require measured L and M"):
            laplace_comparison(cycle_profile, [1.0], invariant=True)

    def test_laplace_empty(self):
        """Tests that an empty spectrum gives a vacuous record."""
        report = laplace_comparison(OrliczProfile(StepFunction()), [1.0])
        assert [r.status for r in report] == ["vacuous"]

    @pytest.mark.parametrize(
        "instance",
        [cycle_instance(12), torus_instance(2, 5), cover_instance(torus_cover(1, 9), 0)],
    )
    def test_laplace_invariant_instances(self, instance):
        """Tests that measured heat norms equal the Laplace transforms of dF and dG."""
        decomposition = decompose(instance)
        profile = OrliczProfile(spectral_density(instance, decomposition))
        t = np.geomspace(1e-2, 1e2, 20)
        measured = np.array([heat_norms(decomposition, s) for s in t]).T

        l_hat, m_hat = heat_profiles(profile, t)
        np.testing.assert_allclose(measured[0], l_hat, rtol=1e-9)
        np.testing.assert_allclose(measured[1], m_hat, rtol=1e-9)

        report = laplace_comparison(profile, t, measured=tuple(measured), invariant=True)
        assert report.passed
        assert all(r.passed for r in report.select("laplace_G"))


class TestAsymptoticFit:
    """Tests for the power-log fit."""

    @pytest.mark.parametrize("k", [0, 1])
    def test_exact_model(self, k):
        """Tests that an exact power-log model is recovered."""
        lam = np.geomspace(0.01, 0.5, 20)
        F = step_from_values(lam, 3.0 * lam**1.5 * np.abs(np.log(lam)) ** k)
        fit = asymptotic_fit(F, (0.01, 0.5), k_candidates=[0, 1, 2])

        assert fit.k == k
        assert fit.alpha == pytest.approx(1.5)
        assert fit.c == pytest.approx(3.0)
        assert fit.residual == pytest.approx(0.0, abs=1e-9)
        assert fit.points == 20
        assert fit(lam[5]) == pytest.approx(F(lam[5]))

    def test_too_few_atoms(self, cycle_decay):
        """Tests that a window with fewer than eight atoms is rejected."""
        with pytest.raises(ValidationError, match=r"contains 2 atoms; at least 8 are required"):
            asymptotic_fit(cycle_decay, (1.0, 5.0))

    def test_invalid_window(self, cycle_decay):
        """Tests that the window bounds must be ordered and positive."""
        with pytest.raises(ValidationError, match=r"must satisfy 0 < lo < hi"):
            asymptotic_fit(cycle_decay, (5.0, 1.0))
