"""Unit tests for the certification harness"""

import math

import numpy as np
import pytest

from orlicz.certify import (
    ALL_CHECKS,
    SuiteOptions,
    TestState,
    build_context,
    check_faber_krahn,
    check_h_sobolev,
    check_jensen_nash,
    check_n_sobolev,
    check_nash,
    check_nash_density,
    check_power_sobolev,
    check_sup_bound,
    check_uncertainty,
    instance_records,
    run_suite,
    support_domain,
    uncertainty_constant,
    validate_minorant,
)
from orlicz.monocalc import (
    ConvexMinorant,
    OrliczProfile,
    StepFunction,
    nash_minorant,
    step_from_atoms,
)
from orlicz.spectral_ops import (
    OperatorInstance,
    cycle_instance,
    decompose,
    project_off_kernel,
    random_psd_instance,
    torus_instance,
)
from orlicz.validator import ValidationError


@pytest.fixture(scope="module")
def cycle():
    """Invariant Laplacian of the cycle with four vertices."""
    return cycle_instance(4)


@pytest.fixture(scope="module")
def decay():
    """Spectral decay of the four-cycle."""
    return StepFunction([2.0, 4.0], [0.5, 0.25])


@pytest.fixture(scope="module")
def minorant(decay):
    """Largest convex minorant of y F⁻¹(y) for the four-cycle."""
    return nash_minorant(decay)


@pytest.fixture
def difference(cycle):
    """The state δ₀ - δ₂ on the four-cycle."""
    return TestState(cycle, [1.0, 0.0, -1.0, 0.0], decompose(cycle), name="diff")


@pytest.fixture
def alternating(cycle):
    """The top eigenvector (1, -1, 1, -1) of the four-cycle."""
    return TestState(cycle, [1.0, -1.0, 1.0, -1.0], decompose(cycle), name="alt")


@pytest.fixture(scope="module")
def cycle16():
    """Spectral context of the cycle with 16 vertices."""
    return build_context(cycle_instance(16))


@pytest.fixture(scope="module")
def cycle16_states(cycle16):
    """Random off-kernel states and a two-point difference on the cycle with 16 vertices."""
    rng = np.random.default_rng(5)
    states = [
        TestState(
            cycle16.instance,
            project_off_kernel(cycle16.decomposition, f),
            cycle16.decomposition,
            f"random-{i}",
        )
        for i, f in enumerate(rng.standard_normal((5, 16)))
    ]
    difference = np.zeros(16)
    difference[[0, 3]] = [1.0, -1.0]
    return states + [TestState(cycle16.instance, difference, cycle16.decomposition, "difference")]


class TestTestState:
    """Unit tests for the TestState class."""

    def test_norms(self, difference):
        """Tests the cached energy and norms."""
        assert difference.energy == pytest.approx(4.0)
        assert difference.l1 == 2.0
        assert difference.l2 == pytest.approx(math.sqrt(2.0))
        assert difference.support.tolist() == [0, 2]

    def test_scaled(self, difference):
        """Tests that scaling a state scales its energy quadratically."""
        assert difference.scaled(3.0).energy == pytest.approx(36.0)

    def test_zero_state(self, cycle):
        """Tests that the zero function is rejected."""
        with pytest.raises(ValidationError, match=r"the zero function is not admissible"):
            TestState(cycle, np.zeros(4))

    def test_kernel_component(self, cycle):
        """Tests that states with a kernel component are rejected."""
        with pytest.raises(ValidationError, match=r"kernel component"):
            TestState(cycle, [1.0, 0.0, 0.0, 0.0], decompose(cycle))

    def test_shape(self, cycle):
        """Tests that the state must match the dimension of the instance."""
        with pytest.raises(ValidationError, match=r"does not match dimension 4"):
            TestState(cycle, [1.0, -1.0])

    def test_support_domain(self, difference, alternating):
        """Tests that the domain covers the supports of f and Af."""
        assert support_domain(difference).points == (0, 2)
        assert support_domain(alternating).measure == 4


class TestChecks:
    """Tests for the individual inequalities on the four-cycle."""

    def test_h_sobolev(self, difference, alternating, decay):
        """Tests the Sobolev-Orlicz inequality with the H-profile."""
        profile = OrliczProfile(decay)
        record = check_h_sobolev(difference, profile)
        assert record.lhs == pytest.approx(0.25)
        assert record.rhs == 1.0
        assert record.passed

        assert check_h_sobolev(alternating, profile).lhs == pytest.approx(0.125)

    def test_n_sobolev(self, difference, decay):
        """Tests the Sobolev-Orlicz inequality with the N-profile."""
        record = check_n_sobolev(difference, OrliczProfile(decay))
        # N(1/16) = (1/16) / t with e^{-2t} = √5 - 2
        expected = 2 * (1 / 16) / (-math.log(math.sqrt(5) - 2) / 2)
        assert record.lhs == pytest.approx(expected, rel=1e-9)
        assert record.rhs == pytest.approx(math.log(2))
        assert record.passed

    def test_nash(self, difference, alternating, decay, minorant):
        """Tests both Nash-type inequalities."""
        record_a, record_b = check_nash(difference, decay, minorant)
        assert (record_a.lhs, record_a.rhs) == pytest.approx((4.0, 16.0))
        assert (record_b.lhs, record_b.rhs) == pytest.approx((2.0, 8.0))

        record_a, _ = check_nash(alternating, decay, minorant)
        assert (record_a.lhs, record_a.rhs) == pytest.approx((8.0, 64.0))

    def test_faber_krahn(self, difference, alternating, decay, minorant):
        """Tests the Faber-Krahn inequality and its vacuous case."""
        record = check_faber_krahn(difference, decay, minorant)
        assert (record.lhs, record.rhs) == pytest.approx((1.0, 4.0))
        assert record.param == "mu=2"

        assert check_faber_krahn(alternating, decay, minorant).status == "vacuous"

    def test_uncertainty_constant(self, decay, minorant):
        """Tests that the ratio to y F⁻¹(y) is smallest at the jump of F."""
        assert uncertainty_constant(decay, minorant) == pytest.approx(0.5)

    def test_uncertainty(self, difference, decay, minorant):
        """Tests the uncertainty principle."""
        record = check_uncertainty(difference, decay, minorant)
        assert record.lhs == pytest.approx(3.0)
        assert record.relation == ">="
        assert record.passed

    def test_uncertainty_refused(self, difference, decay, minorant):
        """Tests that a vanishing constant gives a refused record."""
        record = check_uncertainty(difference, decay, minorant, constant=0.0)
        assert record.status == "refused"
        assert record.passed

    @pytest.mark.parametrize("route", ["h", "n"])
    def test_jensen_nash(self, difference, decay, route):
        """Tests the Nash inequality obtained by Jensen from both profiles."""
        record = check_jensen_nash(difference, OrliczProfile(decay), route)
        assert record.check == f"jensen_nash_{route}"
        assert record.passed

    def test_jensen_nash_h_value(self, difference, decay):
        """Tests the value of the H-route minorant at s = 1/4."""
        record = check_jensen_nash(difference, OrliczProfile(decay), "h")
        assert (record.lhs, record.rhs) == pytest.approx((0.5, 2.0))

    def test_nash_density(self, difference, decay, minorant):
        """Tests the density form of the Nash inequality."""
        record = check_nash_density(difference, decay, minorant)
        assert (record.lhs, record.rhs) == pytest.approx((0.25, 0.75))

    def test_power_sobolev(self, difference, decay):
        """Tests the polynomial Sobolev inequality."""
        record = check_power_sobolev(difference, decay, 2.0)
        assert record.lhs == pytest.approx(2 ** 0.25)
        assert record.rhs == pytest.approx(4 * 0.25 ** 0.25)

    def test_sup_bound(self, difference, decay):
        """Tests the sup bound keeping the profile arguments finite."""
        record = check_sup_bound(difference, OrliczProfile(decay))
        assert (record.lhs, record.rhs) == pytest.approx((1.0, 1.25))

    def test_invalid_minorant(self, decay):
        """Tests that a minorant above y F⁻¹(y) is rejected."""
        with pytest.raises(ValidationError, match=r"Minorant exceeds"):
            validate_minorant(ConvexMinorant([0.0, 0.5], [0.0, 2.0]), decay)

        with pytest.raises(ValidationError, match=r"is not inside \[0, 0.75\]"):
            validate_minorant(ConvexMinorant([0.0, 1.0], [0.0, 0.0]), decay)


class TestInstanceRecords:
    """Tests for the instance-level checks."""

    def test_cycle(self, cycle):
        """Tests that the four-cycle passes every instance-level check."""
        context = build_context(cycle)
        records = instance_records(context, SuiteOptions(t_grid=(0.5, 2.0)))

        decay_records = [r for r in records if r.check == "decay"]
        assert [r.lhs for r in decay_records] == pytest.approx([0.5, 0.75])
        assert [r.rhs for r in decay_records] == pytest.approx([0.5, 0.75])
        assert all(r.instance == "cycle-4" for r in records)
        assert len([r for r in records if r.check == "trace_norm"]) == 2
        assert len([r for r in records if r.check == "heat"]) == 2
        assert all(r.passed for r in records if r.theorem_backed)

    def test_halved_decay_fails(self, cycle):
        """Tests that halving F breaks the decay check."""
        context = build_context(cycle, density_scale=0.5)
        records = instance_records(context, SuiteOptions(checks=("decay",)))
        assert [r.status for r in records] == ["fail", "fail"]


class TestSuiteOptions:
    """Tests for the suite options."""

    def test_defaults(self):
        """Tests the default options."""
        options = SuiteOptions()
        assert options.states == 100
        assert options.checks == ALL_CHECKS
        assert len(options.t_grid) == 20

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            ({"states": -1}, r"State count -1 must be nonnegative"),
            ({"generators": ("lattice",)}, r"Unknown generators \['lattice'\]"),
            ({"checks": ("nash", "magic")}, r"Unknown checks \['magic'\]"),
            ({"density_scale": 0.0}, r"Density scale must be positive"),
            ({"alpha": 1.0}, r"Power-law exponent must be greater than 1"),
            ({"t_grid": (0.0, 1.0)}, r"Heat times must be positive"),
        ],
    )
    def test_invalid(self, kwargs, match):
        """Tests that invalid options are rejected."""
        with pytest.raises(ValidationError, match=match):
            SuiteOptions(**kwargs)


class TestInvariance:
    """Tests for the invariance and monotonicity of the state checks."""

    @staticmethod
    def records(state, context):
        """Runs every state check on a state."""
        F, profile, minorant = context.F, context.profile, context.minorant
        return [
            check_h_sobolev(state, profile),
            check_n_sobolev(state, profile),
            *check_nash(state, F, minorant),
            check_faber_krahn(state, F, minorant),
            check_uncertainty(state, F, minorant, context.constant),
            check_jensen_nash(state, profile, "h", context.jensen["h"]),
            check_jensen_nash(state, profile, "n", context.jensen["n"]),
            check_nash_density(state, F, minorant, context.constant),
            check_power_sobolev(state, F, 2.0),
            check_sup_bound(state, profile),
        ]

    @pytest.mark.parametrize("factor", [1e-3, 1.0, 1e3])
    def test_scale_invariance(self, cycle16, cycle16_states, factor):
        """Tests that multiplying a state by a constant changes no status."""
        for state in cycle16_states:
            base = self.records(state, cycle16)
            scaled = self.records(state.scaled(factor), cycle16)
            assert [r.status for r in scaled] == [r.status for r in base]
            assert scaled[0].lhs == pytest.approx(base[0].lhs, rel=1e-9)

    def test_inflated_decay(self, cycle16, cycle16_states):
        """Tests that inflating the weights of F never raises the left side of Nash record A."""
        F = cycle16.F
        bumped = step_from_atoms(
            [(lam, w + 0.1 * (i == 0)) for i, (lam, w) in enumerate(F.atoms)]
        )
        for inflated in (F.scaled(1.5), F.scaled(4.0), bumped):
            minorant = nash_minorant(inflated)
            for state in cycle16_states:
                base, _ = check_nash(state, F, cycle16.minorant)
                larger, _ = check_nash(state, inflated, minorant)
                assert larger.lhs <= base.lhs


class TestRunSuite:
    """Integration tests for the suite runner."""

    @pytest.mark.parametrize(
        "instance",
        [cycle_instance(8), torus_instance(2, 3), random_psd_instance(6, rank=4, seed=2)],
    )
    def test_positive_control(self, instance):
        """Tests that correct spectral data never fails a theorem-backed check."""
        options = SuiteOptions(states=6, generators=("random", "differences", "eigen"))
        report = run_suite([instance], seed=3, options=options)
        assert report.passed, [r for r in report.failures]
        assert {"nash_A", "h_sobolev", "decay", "sandwich_lower"} <= {r.check for r in report}

    def test_negative_control(self):
        """Tests that halving F fails the decay check; no Nash record can fail on the four-cycle."""
        options = SuiteOptions(states=4, density_scale=0.5)
        report = run_suite([cycle_instance(4)], seed=1, options=options)
        assert not report.passed
        assert {r.check for r in report.failures} >= {"decay"}

    def test_deterministic(self):
        """Tests that the report only depends on the seed, not on the number of workers."""
        options = SuiteOptions(states=5, generators=("random", "differences"))
        first = run_suite([cycle_instance(6)], seed=11, options=options)
        second = run_suite([cycle_instance(6)], seed=11, options=options, jobs=3)
        assert first.to_csv() == second.to_csv()

    def test_record_order(self):
        """Tests that instance-level records come first, followed by the states in order."""
        report = run_suite(
            [cycle_instance(4)], checks=("decay", "nash"), seed=0, options=SuiteOptions(states=2)
        )
        assert [r.state for r in report] == ["", "", "random-0", "random-0", "random-1", "random-1"]
        assert [r.check for r in report][2:4] == ["nash_A", "nash_B"]

    def test_no_states(self):
        """Tests that zero states give an empty passing report."""
        report = run_suite([cycle_instance(4)], options=SuiteOptions(states=0))
        assert len(report) == 0
        assert report.passed

    def test_without_matrix(self):
        """Tests that an instance without a dense matrix is refused."""
        report = run_suite([torus_instance(1, 5000)], options=SuiteOptions(states=1))
        assert [r.status for r in report] == ["refused"]

    def test_empty_spectrum(self):
        """Tests that the zero operator gives a vacuous record."""
        report = run_suite([OperatorInstance(np.zeros((3, 3)), name="zero")])
        assert [(r.check, r.status) for r in report] == [("suite", "vacuous")]
        assert report.passed
