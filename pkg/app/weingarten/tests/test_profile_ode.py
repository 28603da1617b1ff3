import math

import numpy as np
import pytest

from app.weingarten import schemes
from app.weingarten.schemes import Direction, EventKind
from app.weingarten.services import (
    HermiteProfile,
    angle_distance,
    first_integral_check,
    integrate,
    max_residual,
    mean_gauss_relation,
    principal_relation,
    rhs,
    rhs_meangauss,
    rhs_principal,
    second_derivative_check,
    symmetry_defect,
    theta_second,
)
from app.weingarten.utils import exceptions

INIT = schemes.InitialData()

_rng = np.random.default_rng(20240611)
RANDOM_PRINCIPAL = [(float(m), float(n)) for m, n in zip(_rng.uniform(-3.0, 3.0, 20), _rng.uniform(0.2, 2.5, 20))]


def _random_relations(count: int, seed: int) -> list[schemes.WeingartenRelation]:
    """Principal-linear and mean-Gauss relations with |D(0)| > 0.1, so the horizontal start is regular."""
    rng = np.random.default_rng(seed)
    relations = []
    while len(relations) < count:
        if rng.random() < 0.5:
            relations.append(principal_relation(rng.uniform(-3.0, 3.0), rng.uniform(0.2, 2.5)))
            continue
        relation = mean_gauss_relation(rng.uniform(0.5, 4.0), rng.uniform(-3.0, 2.0), float(rng.integers(0, 2)))
        if abs(relation.a / 2.0 + relation.b) > 0.1:
            relations.append(relation)
    return relations


RANDOM_RELATIONS = _random_relations(100, seed=7)


class TestRightHandSide:
    def test_principal_slope(self):
        relation = principal_relation(3.0, 1.0)
        state = schemes.ProfileState(s=0.0, x=0.0, z=2.0, theta=0.0)

        value = rhs_principal(state, relation)  # act

        assert value == pytest.approx(1.5)

    def test_meangauss_slope(self):
        """
        2H + K = 0 at theta = 0, z = 1: theta' = (0 - 2 + 0) / (1 + 1).
        """
        state = schemes.ProfileState(s=0.0, x=0.0, z=1.0, theta=0.0)

        value = rhs(state, mean_gauss_relation(2.0, 1.0, 0.0))  # act

        assert value == pytest.approx(-1.0)

    def test_meangauss_blowup_is_signalled(self):
        state = schemes.ProfileState(s=0.0, x=0.0, z=1.0, theta=math.pi)

        with pytest.raises(exceptions.SlopeBlowupSignal):
            rhs_meangauss(state, mean_gauss_relation(2.0, 1.0, 0.0))  # act

    def test_non_positive_height(self):
        with pytest.raises(exceptions.DomainException):
            rhs(schemes.ProfileState(s=0.0, x=0.0, z=-1.0, theta=0.0), principal_relation(2.0, 0.0))  # act

    def test_wrong_family(self):
        with pytest.raises(exceptions.ContractViolation):
            rhs_principal(schemes.ProfileState(s=0.0, x=0.0, z=1.0, theta=0.0), mean_gauss_relation(2.0, 1.0, 0.0))

    def test_second_derivative_matches_finite_difference(self):
        """
        theta'' along the solution equals d/ds of theta' = N / (z D) with z' = sin(theta).
        """
        relation = mean_gauss_relation(2.0, 1.0, 0.0)
        z, theta, h = 1.3, 0.4, 1e-6
        slope = rhs(schemes.ProfileState(s=0.0, x=0.0, z=z, theta=theta), relation)

        def along(step: float) -> float:
            moved = schemes.ProfileState(s=step, x=0.0, z=z + step * math.sin(theta), theta=theta + step * slope)
            return rhs(moved, relation)

        value = theta_second(schemes.ProfileState(s=0.0, x=0.0, z=z, theta=theta), relation)  # act

        assert value == pytest.approx((along(h) - along(-h)) / (2.0 * h), rel=1e-5)


class TestIntegrate:
    def test_concave_graph_meets_boundary_at_contact_angle(self):
        """
        kappa1 = -2 kappa2 + 1 reaches L from both sides at cos(theta1) = 1/3.
        """
        trace = integrate(principal_relation(-2.0, 1.0), INIT)  # act

        root = math.acos(1.0 / 3.0)
        for direction in Direction:
            event = trace.terminal[direction]
            assert event.kind is EventKind.BoundaryContact
            assert angle_distance(event.payload, root) < 1e-4
        assert np.all(np.diff(trace.s) > 0)
        assert trace.s[trace.origin_index] == 0.0

    def test_convex_incomplete_graph_blows_up(self):
        trace = integrate(mean_gauss_relation(2.0, -3.0, 0.0), INIT)  # act

        root = math.acos(1.0 / 3.0)
        for direction in Direction:
            event = trace.terminal[direction]
            assert event.kind is EventKind.SlopeBlowup
            assert angle_distance(event.payload, root) < 1e-4
        assert np.isinf(trace.theta_prime[0])
        assert np.isinf(trace.theta_prime[-1])

    def test_closed_circle_stays_on_its_circle(self):
        """
        On the circle locus the profile is the Euclidean circle with center height u r, u = -a / (2b).
        Starting at its lowest point with theta' = 1 / r gives r = 1 / theta'(0).
        """
        a, b = math.sqrt(0.75), -0.25
        relation = mean_gauss_relation(a, b, 1.0)
        options = schemes.StepOptions(max_arclength=20.0)

        trace = integrate(relation, INIT, options)  # act

        radius = 1.0 / float(trace.theta_prime[trace.origin_index])
        center = -a / (2.0 * b) * radius
        distance = np.hypot(trace.x, trace.z - center)
        assert center - radius == pytest.approx(1.0, abs=1e-12)
        assert np.abs(distance - radius).max() < 1e-6
        assert trace.terminal_kind(Direction.Forward) is EventKind.MaxArclength
        assert trace.events_of(EventKind.PeriodClosed, Direction.Forward)

    def test_horizontal_line_is_degenerate(self):
        """
        kappa1 = -2 kappa2 + 3 from a horizontal tangent has theta' = 0 and stays a horizontal line.
        """
        options = schemes.StepOptions(max_arclength=5.0)

        trace = integrate(principal_relation(-2.0, 3.0), INIT, options)  # act

        assert trace.degenerate is True
        assert np.all(trace.z == 1.0)
        assert trace.s_extent == (-5.0, 5.0)
        assert trace.events_of(EventKind.StraightLineDegenerate)

    def test_vertical_line_meets_boundary_backward(self):
        trace = integrate(principal_relation(3.0, 0.0), schemes.InitialData(theta0=math.pi / 2))  # act

        assert trace.degenerate is True
        assert trace.terminal_kind(Direction.Backward) is EventKind.BoundaryContact
        assert trace.terminal_kind(Direction.Forward) is EventKind.MaxArclength
        assert trace.z[0] == pytest.approx(trace.options.boundary_eps)

    def test_initial_blowup(self):
        """
        2H + K = 0 has a vanishing denominator at theta0 = pi.
        """
        trace = integrate(mean_gauss_relation(2.0, 1.0, 0.0), schemes.InitialData(theta0=math.pi))  # act

        assert len(trace) == 1
        assert all(trace.terminal_kind(d) is EventKind.SlopeBlowup for d in Direction)

    def test_residual_stays_at_rounding_level(self):
        trace = integrate(mean_gauss_relation(2.0, 1.0, 0.0), INIT)

        worst = max_residual(trace)  # act

        assert worst < 1e-9

    def test_horizontal_start_is_symmetric(self):
        options = schemes.StepOptions(max_arclength=3.0)
        trace = integrate(principal_relation(3.0, 1.0), INIT, options)

        defect = symmetry_defect(trace)  # act

        assert defect < 1e-6

    @pytest.mark.parametrize("relation", RANDOM_RELATIONS, ids=lambda relation: relation.label())
    def test_random_horizontal_starts_are_symmetric(self, relation):
        trace = integrate(relation, INIT, schemes.StepOptions(max_arclength=20.0))

        defect = symmetry_defect(trace)  # act

        assert defect <= 10.0 * trace.options.rel_tol * (1.0 + float(np.abs(trace.z).max()))
        contacts = [e.payload for e in trace.terminal.values() if e.kind is EventKind.BoundaryContact]
        if len(contacts) == 2:
            assert abs(abs(contacts[0]) - abs(contacts[1])) <= 1e-8

    @pytest.mark.parametrize("b", np.linspace(-0.45, -0.02, 10).tolist())
    def test_closed_circle_has_constant_slope(self, b):
        """
        Every relation on the circle locus with -1/2 < b < 0 traces a closed Euclidean circle.
        """
        relation = mean_gauss_relation(2.0 * math.sqrt(-b * (1.0 + b)), b, 1.0)

        trace = integrate(relation, INIT, schemes.StepOptions(max_arclength=10.0))  # act

        slope = trace.theta_prime[trace.origin_index]
        assert relation.on_circle_locus is True
        assert np.abs(trace.theta_prime - slope).max() <= 1e-8 * abs(slope)

    def test_circle_arc_keeps_its_slope_at_the_boundary(self):
        """
        With b < -1/2 the circle is cut by L; theta' stays constant up to the contact states.
        """
        b = -0.9764
        relation = mean_gauss_relation(2.0 * math.sqrt(-b * (1.0 + b)), b, 1.0)

        trace = integrate(relation, INIT)  # act

        slope = trace.theta_prime[trace.origin_index]
        assert trace.boundary_rows() == [0, len(trace) - 1]
        assert trace.theta_prime[0] == trace.theta_prime[1]
        assert trace.theta_prime[-1] == trace.theta_prime[-2]
        assert np.abs(trace.theta_prime - slope).max() <= 1e-6 * abs(slope)

    @pytest.mark.parametrize(
        "relation", [principal_relation(-2.0, 1.0), mean_gauss_relation(2.0, 1.0, 0.0)], ids=["principal", "meangauss"]
    )
    def test_contact_slope_keeps_the_interior_sign(self, relation):
        trace = integrate(relation, INIT)  # act

        rows = trace.boundary_rows()
        assert rows == [0, len(trace) - 1]
        assert np.all(trace.theta_prime < 0)
        assert np.all(np.abs(trace.theta_prime[rows]) <= np.abs(trace.theta_prime[[1, -2]]))

    def test_step_failure_is_raised_with_partial_trace(self, monkeypatch):
        def failing(self, branch, direction):
            self._finish(branch, direction, EventKind.StepFailure, "step size too small")

        monkeypatch.setattr("app.weingarten.services.profile_ode.ProfileIntegrator._arclength_phase", failing)

        with pytest.raises(exceptions.StepFailureException) as info:
            integrate(principal_relation(-2.0, 1.0), INIT)  # act

        assert info.value.trace is not None
        assert "step size too small" in str(info.value)


class TestIdentities:
    def test_first_integral_of_principal_relation(self):
        trace = integrate(principal_relation(-2.0, 1.0), INIT)

        deviation = first_integral_check(trace)  # act

        assert deviation < 1e-5

    @pytest.mark.parametrize("m, n", RANDOM_PRINCIPAL)
    def test_first_integral_over_random_relations(self, m, n):
        trace = integrate(principal_relation(m, n), INIT, schemes.StepOptions(max_arclength=40.0))

        deviation = first_integral_check(trace)  # act

        assert deviation <= 1e-5

    def test_first_integral_needs_principal_relation(self):
        trace = integrate(mean_gauss_relation(2.0, 1.0, 0.0), INIT, schemes.StepOptions(max_arclength=0.5))

        with pytest.raises(exceptions.ContractViolation):
            first_integral_check(trace)  # act

    def test_differentiated_meangauss_identity(self):
        options = schemes.StepOptions(max_step=1e-3, max_arclength=0.5)
        trace = integrate(mean_gauss_relation(2.0, 1.0, 0.0), INIT, options)

        deviation = second_derivative_check(trace)  # act

        assert deviation < 1e-5

    def test_hermite_profile_interpolates_states(self):
        trace = integrate(principal_relation(3.0, 1.0), INIT, schemes.StepOptions(max_arclength=2.0))
        profile = HermiteProfile(trace)

        x, z, theta = profile(trace.s)  # act

        assert np.allclose(x, trace.x, atol=1e-12)
        assert np.allclose(z, trace.z, atol=1e-12)
        assert np.allclose(theta, trace.theta, atol=1e-12)

    def test_hermite_profile_needs_two_states(self):
        trace = integrate(mean_gauss_relation(2.0, 1.0, 0.0), schemes.InitialData(theta0=math.pi))

        with pytest.raises(exceptions.InsufficientDataException):
            HermiteProfile(trace)  # act
