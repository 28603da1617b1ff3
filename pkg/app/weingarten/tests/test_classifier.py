import math

import pytest

from app.weingarten import schemes
from app.weingarten.schemes import AsymptoticBoundary, ShapeClass
from app.weingarten.services import (
    classify,
    classify_meangauss,
    classify_principal,
    contact_angle_root,
    mean_gauss_relation,
    principal_relation,
)
from app.weingarten.utils import exceptions


class TestClassifyPrincipal:
    @pytest.mark.parametrize(
        "m, n, theta0, shape",
        [
            (1.0, 2.0, 0.0, ShapeClass.PeriodicSelfIntersecting),
            (3.0, 1.0, 0.0, ShapeClass.MinimumWithSelfIntersections),
            (2.0, 0.0, 0.0, ShapeClass.ConvexGraph),
            (-2.0, 1.0, 0.0, ShapeClass.ConcaveGraphToBoundary),
            (-2.0, 3.0, math.pi / 2, ShapeClass.AsymptoticToBoundary),
            (3.0, 1.0, math.pi, ShapeClass.ConvexGraph),
            (-2.0, 1.0, math.pi, ShapeClass.NotAGraphToBoundary),
            (-2.0, 1.0, 1.0, ShapeClass.Undetermined),
        ],
    )
    def test_case_table(self, m, n, theta0, shape):
        verdict = classify_principal(principal_relation(m, n), theta0)  # act

        assert verdict.shape_class is shape

    def test_concave_graph_contact_angle(self):
        """
        kappa1 = -2 kappa2 + 1 meets L at cos(theta1) = 1/3.
        """
        verdict = classify(principal_relation(-2.0, 1.0))  # act

        assert verdict.contact_angle.role is schemes.AngleRole.Contact
        assert verdict.contact_angle.root == pytest.approx(math.acos(1.0 / 3.0), abs=1e-12)
        assert verdict.asymptotic_boundary is AsymptoticBoundary.TwoTangentCircles
        assert verdict.maxima == 1
        assert verdict.minima == 0

    def test_minimum_with_self_intersections_asymptote(self):
        verdict = classify(principal_relation(3.0, 1.0))  # act

        assert verdict.contact_angle.role is schemes.AngleRole.Asymptotic
        assert verdict.contact_angle.root == pytest.approx(2.0 * math.pi / 3.0, abs=1e-12)
        assert verdict.asymptotic_inferred is True
        assert verdict.self_intersects is True

    def test_vanishing_initial_slope_is_a_horosphere(self):
        """
        kappa1 = -2 kappa2 + 3 from a horizontal tangent has theta' = 0, a horizontal line.
        """
        verdict = classify(principal_relation(-2.0, 3.0), 0.0)  # act

        assert verdict.shape_class is ShapeClass.Horosphere
        assert verdict.asymptotic_boundary is AsymptoticBoundary.PointInfinity

    def test_vertical_line_is_a_geodesic_plane(self):
        verdict = classify(principal_relation(3.0, 0.0), math.pi / 2)  # act

        assert verdict.shape_class is ShapeClass.GeodesicPlane
        assert verdict.graph_over_l is False

    def test_angles_are_reduced_modulo_two_pi(self):
        verdict = classify(principal_relation(2.0, 0.0), 2.0 * math.pi)  # act

        assert verdict.shape_class is ShapeClass.ConvexGraph

    def test_trivial_relation_routes_to_trivial_verdict(self):
        verdict = classify(principal_relation(-1.0, 2.0))  # act

        assert verdict.shape_class is ShapeClass.CMCTrivial
        assert verdict.vacuous is True

    def test_wrong_family_is_a_contract_violation(self):
        with pytest.raises(exceptions.ContractViolation):
            classify_principal(mean_gauss_relation(2.0, 1.0, 0.0))  # act


class TestClassifyMeanGauss:
    @pytest.mark.parametrize(
        "a, b, c, shape",
        [
            (2.0, 1.0, 0.0, ShapeClass.ConcaveGraphToBoundary),
            (2.0, -0.7, 0.0, ShapeClass.NotAGraphToBoundary),
            (2.0, -3.0, 0.0, ShapeClass.ConvexGraphIncomplete),
            (0.5, -1.0, 1.0, ShapeClass.ConcaveGraphToBoundary),
            (0.5, -0.8, 1.0, ShapeClass.InteriorBlowupIncomplete),
            (0.5, -0.2, 1.0, ShapeClass.PeriodicSelfIntersecting),
            (0.5, 0.3, 1.0, ShapeClass.InteriorBlowupIncomplete),
            (2.0, -2.0, 1.0, ShapeClass.ConvexGraphIncomplete),
            (2.0, -0.5, 1.0, ShapeClass.ConcaveGraphToBoundary),
            (4.0, -1.5, 1.0, ShapeClass.NotAGraphToBoundary),
        ],
    )
    def test_case_table(self, a, b, c, shape):
        verdict = classify_meangauss(mean_gauss_relation(a, b, c))  # act

        assert verdict.shape_class is shape

    def test_blowup_angle_of_convex_incomplete_graph(self):
        """
        2H - 3K = 0 blows up where 1 + b cos(theta1) = 0.
        """
        verdict = classify(mean_gauss_relation(2.0, -3.0, 0.0))  # act

        assert verdict.complete is False
        assert verdict.contact_angle.role is schemes.AngleRole.Blowup
        assert verdict.contact_angle.root == pytest.approx(math.acos(1.0 / 3.0), abs=1e-12)

    def test_zero_contact_angle(self):
        verdict = classify(mean_gauss_relation(2.0, 1.0, 0.0))  # act

        assert verdict.contact_angle.root == pytest.approx(math.acos(math.sqrt(2.0) - 1.0), abs=1e-12)

    def test_closed_circle(self):
        """
        On a^2 + 4b^2 + 4b = 0 with -a / (2b) > 1 the profile is a full Euclidean circle.
        """
        verdict = classify(mean_gauss_relation(math.sqrt(0.75), -0.25, 1.0))  # act

        assert verdict.shape_class is ShapeClass.EuclideanCircle
        assert verdict.periodic is True
        assert verdict.asymptotic_boundary is AsymptoticBoundary.PointInfinity

    def test_circle_arc_with_double_contact_root(self):
        verdict = classify(mean_gauss_relation(0.8, -0.8, 1.0))  # act

        assert verdict.shape_class is ShapeClass.EuclideanCircle
        assert verdict.asymptotic_boundary is AsymptoticBoundary.TwoTangentCircles
        assert verdict.contact_angle.root == pytest.approx(math.pi / 3.0, abs=1e-6)

    def test_circle_through_initial_point_with_horizontal_tangent_is_a_line(self):
        verdict = classify(mean_gauss_relation(1.0, -0.5, 1.0))  # act

        assert verdict.shape_class is ShapeClass.EuclideanCircle
        assert verdict.convexity is schemes.Convexity.Flat
        assert verdict.asymptotic_boundary is AsymptoticBoundary.PointInfinity

    def test_untreated_angle_is_undetermined(self):
        verdict = classify(mean_gauss_relation(2.0, 1.0, 0.0), 0.4)  # act

        assert verdict.shape_class is ShapeClass.Undetermined
        assert verdict.vacuous is True

    @pytest.mark.parametrize(
        "a, b, c, shape",
        [
            (0.0, 1.0, 1.0, ShapeClass.ConstantGaussTrivial),
            (2.0, 0.0, 0.0, ShapeClass.CMCTrivial),
            (3.0, 0.0, 1.0, ShapeClass.CMCTrivial),
        ],
    )
    def test_trivial_patterns(self, a, b, c, shape):
        verdict = classify(mean_gauss_relation(a, b, c))  # act

        assert verdict.shape_class is shape

    def test_verdict_json_uses_camel_case(self):
        payload = classify(mean_gauss_relation(2.0, 1.0, 0.0)).to_json()  # act

        assert payload["shapeClass"] == "ConcaveGraphToBoundary"
        assert payload["graphOverL"] is True
        assert payload["contactAngle"]["equation"] == schemes.ContactEquation.MeanGaussZeroContact.value


class TestContactAngleRoot:
    def test_linear_equation(self):
        root = contact_angle_root(schemes.ContactEquation.MeanGaussUnitBlowup, {"a": 0.5, "b": -0.8})  # act

        assert math.cos(root) == pytest.approx(0.3125, abs=1e-12)

    def test_root_in_upper_half_turn(self):
        root = contact_angle_root(schemes.ContactEquation.PrincipalContact, {"m": 3.0, "n": 1.0})  # act

        assert 0.0 <= root <= math.pi

    def test_no_admissible_root(self):
        with pytest.raises(exceptions.ContactAngleInconsistency):
            contact_angle_root(schemes.ContactEquation.PrincipalContact, {"m": 3.0, "n": 5.0})  # act
