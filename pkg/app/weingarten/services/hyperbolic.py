import math

from app.weingarten import schemes
from app.weingarten.services.classifier import classify_trivial
from app.weingarten.utils import exceptions
from app.weingarten.utils.managers import get_manager

__all__ = [
    "curvatures_at",
    "hyperbolic_curvature",
    "gauss_map",
    "normalize_relation",
    "principal_relation",
    "mean_gauss_relation",
    "residual",
]


def hyperbolic_curvature(state: schemes.ProfileState, theta_prime: float) -> float:
    """Hyperbolic curvature z * theta' + cos(theta) of the generating curve."""
    if state.z <= 0:
        raise exceptions.DomainException(f"height must be positive, got z={state.z!r}")
    return state.z * theta_prime + math.cos(state.theta)


def curvatures_at(state: schemes.ProfileState, theta_prime: float) -> schemes.CurvaturePair:
    """
    Principal, mean and Gauss curvature of the parabolic surface at one profile point.
    Args:
        state (schemes.ProfileState): point of the generating curve, z > 0.
        theta_prime (float): derivative of the tangent angle with respect to arc length.
    Returns:
        schemes.CurvaturePair: kappa1 = z theta' + cos(theta), kappa2 = cos(theta),
        H = (kappa1 + kappa2) / 2, K = kappa1 kappa2 - 1.
    Raises:
        exceptions.DomainException: If z is not positive.
    """
    kappa1 = hyperbolic_curvature(state, theta_prime)
    kappa2 = math.cos(state.theta)
    return schemes.CurvaturePair(
        kappa1=kappa1,
        kappa2=kappa2,
        h=(kappa1 + kappa2) / 2,
        k=kappa1 * kappa2 - 1,
    )


def gauss_map(state: schemes.ProfileState) -> tuple[float, float, float]:
    """Unit normal z(-sin(theta), 0, cos(theta)) in the hyperbolic metric; fixes the curvature signs."""
    if state.z <= 0:
        raise exceptions.DomainException(f"height must be positive, got z={state.z!r}")
    return -state.z * math.sin(state.theta), 0.0, state.z * math.cos(state.theta)


def normalize_relation(
    raw_a: float,
    raw_b: float,
    raw_c: float,
    kind: schemes.RelationKind,
) -> schemes.WeingartenRelation:
    """
    Bring a*kappa1 + b*kappa2 = c or a*H + b*K = c to its canonical form.
    Reversing the orientation negates both principal curvatures, so it maps n to -n in the
    principal-linear family and a to -a (H changes sign, K does not) in the mean-Gauss family.
    Args:
        raw_a (float): coefficient of kappa1 or H.
        raw_b (float): coefficient of kappa2 or K.
        raw_c (float): right hand side.
        kind (schemes.RelationKind): relation family.
    Returns:
        schemes.WeingartenRelation: normalized relation with the orientation flip recorded.
    Raises:
        exceptions.InvalidRelationException: If no coefficient of a curvature is non-zero.
        exceptions.TrivialRelationException: If a principal-linear relation fixes one principal curvature.
    """
    if raw_a == 0 and raw_b == 0:
        raise exceptions.InvalidRelationException(
            f"relation {raw_a!r}, {raw_b!r}, {raw_c!r} does not involve any curvature"
        )

    if kind is schemes.RelationKind.PrincipalLinear:
        if raw_a == 0 or raw_b == 0:
            verdict = classify_trivial(raw_a, raw_b, raw_c, kind)
            raise exceptions.TrivialRelationException("one principal curvature is constant", verdict)
        m, n = -raw_b / raw_a, raw_c / raw_a
        flipped = n < 0
        return schemes.WeingartenRelation(kind=kind, m=m + 0.0, n=abs(n), orientation_flipped=flipped)

    if raw_c == 0:
        if raw_a == 0:
            return schemes.WeingartenRelation(kind=kind, a=0.0, b=1.0, c=0.0)
        return schemes.WeingartenRelation(kind=kind, a=2.0, b=2.0 * raw_b / raw_a + 0.0, c=0.0)

    a, b = raw_a / raw_c, raw_b / raw_c
    flipped = a < 0
    return schemes.WeingartenRelation(kind=kind, a=abs(a), b=b + 0.0, c=1.0, orientation_flipped=flipped)


def principal_relation(m: float, n: float) -> schemes.WeingartenRelation:
    """kappa1 = m * kappa2 + n, normalized."""
    return normalize_relation(1.0, -m, n, schemes.RelationKind.PrincipalLinear)


def mean_gauss_relation(a: float, b: float, c: float) -> schemes.WeingartenRelation:
    """a * H + b * K = c, normalized."""
    return normalize_relation(a, b, c, schemes.RelationKind.MeanGauss)


def residual(relation: schemes.WeingartenRelation, pair: schemes.CurvaturePair) -> float:
    return get_manager(relation).residual(pair)
