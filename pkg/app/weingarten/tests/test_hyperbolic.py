import math

import pytest

from app.weingarten import schemes
from app.weingarten.services import curvatures_at, gauss_map, mean_gauss_relation, normalize_relation, residual
from app.weingarten.services.hyperbolic import principal_relation
from app.weingarten.utils import exceptions

STATE = schemes.ProfileState(s=0.0, x=0.0, z=2.0, theta=0.0)


class TestCurvatures:
    def test_curvatures_of_horizontal_point(self):
        """
        kappa1 = z theta' + cos(theta), kappa2 = cos(theta), H their mean, K = kappa1 kappa2 - 1.
        """
        pair = curvatures_at(STATE, 0.5)  # act

        assert pair.kappa1 == pytest.approx(2.0)
        assert pair.kappa2 == pytest.approx(1.0)
        assert pair.h == pytest.approx(1.5)
        assert pair.k == pytest.approx(1.0)

    def test_horosphere_is_umbilical(self):
        """
        A horizontal line has kappa1 = kappa2 = 1 and K = 0.
        """
        pair = curvatures_at(schemes.ProfileState(s=0.0, x=3.0, z=0.25, theta=0.0), 0.0)  # act

        assert pair.kappa1 == pair.kappa2 == 1.0
        assert pair.k == 0.0

    def test_non_positive_height_is_rejected(self):
        with pytest.raises(exceptions.DomainException):
            curvatures_at(schemes.ProfileState(s=0.0, x=0.0, z=0.0, theta=0.0), 1.0)  # act

    def test_gauss_map_is_unit_in_hyperbolic_metric(self):
        state = schemes.ProfileState(s=0.0, x=0.0, z=3.0, theta=0.7)

        nx, ny, nz = gauss_map(state)  # act

        assert ny == 0.0
        assert math.hypot(nx, nz) / state.z == pytest.approx(1.0)

    def test_residual_vanishes_on_relation(self):
        relation = principal_relation(-2.0, 1.0)
        theta_prime = ((relation.m - 1.0) * math.cos(0.3) + relation.n) / 1.5
        pair = curvatures_at(schemes.ProfileState(s=0.0, x=0.0, z=1.5, theta=0.3), theta_prime)

        value = residual(relation, pair)  # act

        assert value == pytest.approx(0.0, abs=1e-14)


class TestNormalizeRelation:
    def test_principal_negative_offset_flips_orientation(self):
        """
        kappa1 = 2 kappa2 - 3 reverses into kappa1 = 2 kappa2 + 3.
        """
        relation = normalize_relation(1.0, -2.0, -3.0, schemes.RelationKind.PrincipalLinear)  # act

        assert relation.m == 2.0
        assert relation.n == 3.0
        assert relation.orientation_flipped is True

    def test_principal_scaling_divides_by_first_coefficient(self):
        relation = normalize_relation(2.0, 4.0, 2.0, schemes.RelationKind.PrincipalLinear)  # act

        assert relation.m == -2.0
        assert relation.n == 1.0
        assert relation.orientation_flipped is False

    def test_meangauss_unit_right_hand_side(self):
        """
        -4 H + 2 K = 2 becomes 2 H + K = 1 after dividing by c and reversing the orientation.
        """
        relation = mean_gauss_relation(-4.0, 2.0, 2.0)  # act

        assert (relation.a, relation.b, relation.c) == (2.0, 1.0, 1.0)
        assert relation.orientation_flipped is True

    def test_meangauss_zero_right_hand_side_scales_a_to_two(self):
        relation = mean_gauss_relation(4.0, -3.0, 0.0)  # act

        assert (relation.a, relation.b, relation.c) == (2.0, -1.5, 0.0)

    @pytest.mark.parametrize(
        "raw, kind",
        [
            ((1.0, -2.0, -3.0), schemes.RelationKind.PrincipalLinear),
            ((2.0, 4.0, 2.0), schemes.RelationKind.PrincipalLinear),
            ((-4.0, 2.0, 2.0), schemes.RelationKind.MeanGauss),
            ((4.0, -3.0, 0.0), schemes.RelationKind.MeanGauss),
            ((0.0, 1.0, 0.0), schemes.RelationKind.MeanGauss),
            ((0.5, -0.2, 1.0), schemes.RelationKind.MeanGauss),
        ],
    )
    def test_normalizing_twice_changes_nothing(self, raw, kind):
        relation = normalize_relation(*raw, kind)

        again = normalize_relation(*relation.raw_coefficients, kind)  # act

        assert again == relation.model_copy(update={"orientation_flipped": False})

    def test_no_curvature_is_invalid(self):
        with pytest.raises(exceptions.InvalidRelationException):
            normalize_relation(0.0, 0.0, 1.0, schemes.RelationKind.MeanGauss)  # act

    @pytest.mark.parametrize(
        "raw, shape",
        [
            ((0.0, 1.0, 0.0), schemes.ShapeClass.GeodesicPlane),
            ((0.0, 1.0, 1.0), schemes.ShapeClass.Horosphere),
            ((1.0, 0.0, 0.5), schemes.ShapeClass.ConstantPrincipalCurvature),
        ],
    )
    def test_constant_principal_curvature_is_trivial(self, raw, shape):
        with pytest.raises(exceptions.TrivialRelationException) as info:
            normalize_relation(*raw, schemes.RelationKind.PrincipalLinear)  # act

        assert info.value.verdict.shape_class is shape

    def test_normal_form_is_validated(self):
        with pytest.raises(ValueError):
            schemes.WeingartenRelation(kind=schemes.RelationKind.MeanGauss, a=1.0, b=1.0, c=0.0)  # act
