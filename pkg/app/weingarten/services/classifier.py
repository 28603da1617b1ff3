import logging
import math

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import ValidationError
from scipy import optimize

from app.weingarten import schemes
from app.weingarten.schemes import AsymptoticBoundary as Boundary
from app.weingarten.schemes import ShapeClass
from app.weingarten.utils import exceptions
from app.weingarten.utils.managers import get_manager

__all__ = [
    "classify",
    "classify_principal",
    "classify_meangauss",
    "classify_trivial",
    "contact_angle_root",
]

logger = logging.getLogger(__name__)

CASE_EPS = 1e-12
ROOT_TOL = 1e-12
TWO_PI = 2.0 * math.pi


def _near(value: float, target: float, eps: float = CASE_EPS) -> bool:
    return abs(value - target) <= eps


def _reduced_angle(theta0: float) -> float:
    t = math.fmod(theta0, TWO_PI)
    if t < 0:
        t += TWO_PI
    return 0.0 if _near(t, TWO_PI) else t


def _require_normalized(relation: schemes.WeingartenRelation, kind: schemes.RelationKind) -> None:
    if relation.kind is not kind:
        raise exceptions.ContractViolation(f"expected a {kind.value} relation, got {relation.kind.value}")
    try:
        schemes.WeingartenRelation.model_validate(relation.model_dump())
    except ValidationError as exc:
        raise exceptions.ContractViolation(f"relation is not normalized: {exc.errors()[0]['msg']}")


def _line_verdict(cos_value: float, case: str) -> schemes.ClassificationVerdict:
    """Straight profile with constant cos(theta) = kappa2."""
    if abs(cos_value) > 1.0 + CASE_EPS:
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.Undetermined,
            theorem_ref=case,
            note=f"no real angle has cos(theta) = {cos_value!r}",
        )
    if _near(abs(cos_value), 1.0):
        shape, boundary, graph = ShapeClass.Horosphere, Boundary.PointInfinity, True
    elif _near(cos_value, 0.0):
        shape, boundary, graph = ShapeClass.GeodesicPlane, Boundary.OneCircle, False
    else:
        shape, boundary, graph = ShapeClass.EquidistantSurface, Boundary.OneCircle, True
    return schemes.ClassificationVerdict(
        shape_class=shape,
        theorem_ref=case,
        complete=True,
        graph_over_l=graph,
        asymptotic_boundary=boundary,
        self_intersects=False,
        convexity=schemes.Convexity.Flat,
        minima=0,
        maxima=0,
    )


def _line_family(value: float) -> list[ShapeClass]:
    if abs(value) > 1.0 + CASE_EPS:
        return []
    return [_line_verdict(value, "").shape_class]


def classify_trivial(
    raw_a: float,
    raw_b: float,
    raw_c: float,
    kind: schemes.RelationKind,
) -> schemes.ClassificationVerdict:
    """
    Verdict for the coefficient patterns with one constant principal curvature, umbilical or
    constant mean or Gauss curvature surfaces.
    Raises:
        exceptions.ContractViolation: If the coefficients are not one of the trivial patterns.
    """
    if raw_a == 0 and raw_b == 0:
        raise exceptions.ContractViolation("relation does not involve any curvature")

    if kind is schemes.RelationKind.PrincipalLinear:
        if raw_a == 0:
            value = raw_c / raw_b
            return _line_verdict(value, f"trivial/kappa2={value!r}")
        if raw_b == 0:
            value = raw_c / raw_a
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.ConstantPrincipalCurvature,
                theorem_ref=f"trivial/kappa1={value!r}",
                family=_line_family(value) + [ShapeClass.EuclideanCircle],
                note="lines with cos(theta) = kappa1 and horizontal right-cylinders over Euclidean circles",
            )
        m, n = -raw_b / raw_a, raw_c / raw_a
        if m == 1.0 and n == 0.0:
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.UmbilicalTrivial,
                theorem_ref="trivial/umbilical",
                family=[ShapeClass.GeodesicPlane, ShapeClass.EquidistantSurface, ShapeClass.Horosphere],
            )
        if m == -1.0:
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.CMCTrivial,
                theorem_ref="trivial/constant-mean-curvature",
                note=f"H = {abs(n) / 2!r}",
            )
        raise exceptions.ContractViolation(f"kappa1 = {m!r} kappa2 + {n!r} is not a trivial relation")

    if raw_a == 0:
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.ConstantGaussTrivial,
            theorem_ref="trivial/constant-gauss-curvature",
            note=f"K = {raw_c / raw_b!r}",
        )
    if raw_b == 0:
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.CMCTrivial,
            theorem_ref="trivial/constant-mean-curvature",
            note="minimal surface" if raw_c == 0 else f"H = {raw_c / raw_a!r}",
        )
    raise exceptions.ContractViolation(f"{raw_a!r} H + {raw_b!r} K = {raw_c!r} is not a trivial relation")


def _contact(
    equation: schemes.ContactEquation,
    coefficients: dict[str, float],
    role: schemes.AngleRole = schemes.AngleRole.Contact,
) -> schemes.ContactAngle:
    return schemes.ContactAngle(
        equation=equation,
        role=role,
        coefficients=coefficients,
        root=contact_angle_root(equation, coefficients),
    )


def classify_principal(relation: schemes.WeingartenRelation, theta0: float = 0.0) -> schemes.ClassificationVerdict:
    """
    Case table of kappa1 = m kappa2 + n for horizontal, vertical and reversed initial tangents.
    Args:
        relation (schemes.WeingartenRelation): normalized principal-linear relation.
        theta0 (float): initial tangent angle.
    Returns:
        schemes.ClassificationVerdict: the predicted signature, Undetermined outside the treated cases.
    Raises:
        exceptions.ContractViolation: If the relation is not a normalized principal-linear one.
    """
    _require_normalized(relation, schemes.RelationKind.PrincipalLinear)
    if relation.trivial is not None:
        return classify_trivial(*relation.raw_coefficients, relation.kind)

    m, n = relation.m, relation.n
    manager = get_manager(relation)
    t = _reduced_angle(theta0)
    coefficients = {"m": m, "n": n}
    slope_sum = n + m - 1  # type: ignore[operator]

    if abs(float(manager.numerator(theta0))) <= CASE_EPS:
        return _line_verdict(math.cos(theta0), "principal/straight-line")

    if n > abs(m - 1) + CASE_EPS:  # type: ignore[operator]
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.PeriodicSelfIntersecting,
            theorem_ref="principal/n+m-1>0,m<n+1",
            complete=True,
            periodic=True,
            graph_over_l=False,
            asymptotic_boundary=Boundary.PointInfinity,
            self_intersects=True,
            convexity=schemes.Convexity.Mixed,
            note="one maximum and one minimum in each period",
        )

    if _near(t, 0.0):
        if slope_sum > 0:
            asymptote = _contact(schemes.ContactEquation.PrincipalContact, coefficients, schemes.AngleRole.Asymptotic)
            if n > CASE_EPS:  # type: ignore[operator]
                return schemes.ClassificationVerdict(
                    shape_class=ShapeClass.MinimumWithSelfIntersections,
                    theorem_ref="principal/theta0=0,n+m-1>0,m>=n+1,n>0",
                    contact_angle=asymptote,
                    complete=True,
                    graph_over_l=False,
                    asymptotic_boundary=Boundary.PointInfinity,
                    asymptotic_inferred=True,
                    self_intersects=True,
                    minima=1,
                    maxima=0,
                )
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.ConvexGraph,
                theorem_ref="principal/theta0=0,n+m-1>0,m>=n+1,n=0",
                contact_angle=asymptote,
                complete=True,
                graph_over_l=True,
                asymptotic_boundary=Boundary.PointInfinity,
                asymptotic_inferred=True,
                self_intersects=False,
                convexity=schemes.Convexity.Convex,
                minima=1,
                maxima=0,
            )
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.ConcaveGraphToBoundary,
            theorem_ref="principal/theta0=0,n+m-1<0",
            contact_angle=_contact(schemes.ContactEquation.PrincipalContact, coefficients),
            complete=True,
            graph_over_l=True,
            asymptotic_boundary=Boundary.TwoTangentCircles,
            self_intersects=False,
            convexity=schemes.Convexity.Concave,
            minima=0,
            maxima=1,
        )

    if _near(slope_sum, 0.0):
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.AsymptoticToBoundary,
            theorem_ref="principal/theta0 in (0,2pi),n+m-1=0",
            complete=True,
            graph_over_l=False,
            asymptotic_boundary=Boundary.OneCircle,
            self_intersects=True,
            maxima=1,
            minima=0,
            note="both ends approach L as x goes to infinity",
        )

    if _near(t, math.pi):
        if slope_sum > 0:
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.ConvexGraph,
                theorem_ref="principal/theta0=pi,m>=n+1",
                contact_angle=_contact(
                    schemes.ContactEquation.PrincipalContact, coefficients, schemes.AngleRole.Asymptotic
                ),
                complete=True,
                graph_over_l=True,
                asymptotic_boundary=Boundary.PointInfinity,
                asymptotic_inferred=True,
                self_intersects=False,
                convexity=schemes.Convexity.Convex,
                minima=1,
                maxima=0,
            )
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.NotAGraphToBoundary,
            theorem_ref="principal/theta0=pi,n+m-1<0",
            contact_angle=_contact(schemes.ContactEquation.PrincipalContact, coefficients),
            complete=True,
            graph_over_l=False,
            asymptotic_boundary=Boundary.TwoTangentCircles,
            minima=0,
            maxima=1,
        )

    return schemes.ClassificationVerdict(
        shape_class=ShapeClass.Undetermined,
        theorem_ref="principal/untreated-initial-angle",
        note=f"theta0 = {theta0!r} is outside the treated initial angles",
    )


def _circle_verdict(relation: schemes.WeingartenRelation, theta0: float) -> schemes.ClassificationVerdict:
    """
    Solutions on a^2 + 4b^2 + 4b = 0 are Euclidean circles whose center height over signed radius
    equals u = -a / (2b); u > 1 closes the circle inside z > 0, u < 1 cuts it with L.
    """
    a, b, _ = relation.raw_coefficients
    u = -a / (2.0 * b)
    case = "meangauss/c=1,circle-locus"
    horizontal = _near(_reduced_angle(theta0), 0.0)
    if _near(u, math.cos(theta0)):
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.EuclideanCircle,
            theorem_ref=case,
            complete=True,
            graph_over_l=True,
            asymptotic_boundary=Boundary.PointInfinity if _near(abs(u), 1.0) else Boundary.OneCircle,
            self_intersects=False,
            convexity=schemes.Convexity.Flat,
            minima=0,
            maxima=0,
            note="degenerate circle of infinite radius, a straight line",
        )
    if u > 1.0 + CASE_EPS:
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.EuclideanCircle,
            theorem_ref=case,
            complete=True,
            periodic=True,
            graph_over_l=False,
            asymptotic_boundary=Boundary.PointInfinity,
            self_intersects=False,
            convexity=schemes.Convexity.Mixed,
            note="full circle inside the half-space",
        )
    if _near(u, 1.0):
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.EuclideanCircle,
            theorem_ref=case,
            complete=True,
            graph_over_l=False,
            asymptotic_boundary=Boundary.OneCircle,
            self_intersects=False,
            note="circle tangent to L",
        )
    return schemes.ClassificationVerdict(
        shape_class=ShapeClass.EuclideanCircle,
        theorem_ref=case,
        contact_angle=_contact(schemes.ContactEquation.MeanGaussUnitContact, {"a": a, "b": b}),
        complete=True,
        graph_over_l=True if horizontal else None,
        asymptotic_boundary=Boundary.TwoTangentCircles,
        self_intersects=False,
        convexity=schemes.Convexity.Concave if horizontal else None,
        minima=0 if horizontal else None,
        maxima=1 if horizontal else None,
        note="circular arc ending on L",
    )


def _undetermined(case: str, note: str) -> schemes.ClassificationVerdict:
    return schemes.ClassificationVerdict(shape_class=ShapeClass.Undetermined, theorem_ref=case, note=note)


def classify_meangauss(relation: schemes.WeingartenRelation, theta0: float = 0.0) -> schemes.ClassificationVerdict:
    """
    Case table of a H + b K = c, c in {0, 1}, for a horizontal initial tangent.
    Args:
        relation (schemes.WeingartenRelation): normalized mean-Gauss relation.
        theta0 (float): initial tangent angle; only 0 is treated beyond circles and straight lines.
    Returns:
        schemes.ClassificationVerdict: the predicted signature.
    Raises:
        exceptions.ContractViolation: If the relation is not a normalized mean-Gauss one.
    """
    _require_normalized(relation, schemes.RelationKind.MeanGauss)
    if relation.trivial is not None:
        return classify_trivial(*relation.raw_coefficients, relation.kind)

    a, b, c = relation.raw_coefficients
    manager = get_manager(relation)
    coefficients = {"a": a, "b": b}

    if relation.on_circle_locus:
        return _circle_verdict(relation, theta0)

    if _near(float(manager.denominator(theta0)), 0.0):
        return _undetermined("meangauss/vanishing-initial-denominator", "theta'(0) is undefined")
    if abs(float(manager.numerator(theta0))) <= CASE_EPS:
        return _line_verdict(math.cos(theta0), "meangauss/straight-line")
    if not _near(_reduced_angle(theta0), 0.0):
        return _undetermined("meangauss/untreated-initial-angle", f"theta0 = {theta0!r} is not treated")

    if c == 0.0:
        if b > 0:
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.ConcaveGraphToBoundary,
                theorem_ref="meangauss/c=0,b>=0",
                contact_angle=_contact(schemes.ContactEquation.MeanGaussZeroContact, coefficients),
                complete=True,
                graph_over_l=True,
                asymptotic_boundary=Boundary.TwoTangentCircles,
                self_intersects=False,
                convexity=schemes.Convexity.Concave,
                minima=0,
                maxima=1,
            )
        if b > -1.0:
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.NotAGraphToBoundary,
                theorem_ref="meangauss/c=0,-1<b<0",
                contact_angle=_contact(schemes.ContactEquation.MeanGaussZeroContact, coefficients),
                complete=True,
                graph_over_l=False,
                asymptotic_boundary=Boundary.TwoTangentCircles,
                minima=0,
                maxima=1,
                note="embedded above an empirical threshold b0, self-intersecting below it",
            )
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.ConvexGraphIncomplete,
            theorem_ref="meangauss/c=0,b<-1",
            contact_angle=_contact(schemes.ContactEquation.MeanGaussZeroBlowup, coefficients, schemes.AngleRole.Blowup),
            complete=False,
            graph_over_l=True,
            self_intersects=False,
            convexity=schemes.Convexity.Convex,
            minima=1,
            maxima=0,
        )

    if a < 1.0:
        if a + 2 * b < 0:
            threshold = -(1.0 + math.sqrt(1.0 - a * a)) / 2.0
            if b < threshold:
                return schemes.ClassificationVerdict(
                    shape_class=ShapeClass.ConcaveGraphToBoundary,
                    theorem_ref="meangauss/c=1,0<a<1,b<-(1+sqrt(1-a^2))/2",
                    contact_angle=_contact(schemes.ContactEquation.MeanGaussUnitContact, coefficients),
                    complete=True,
                    graph_over_l=True,
                    asymptotic_boundary=Boundary.TwoTangentCircles,
                    self_intersects=False,
                    convexity=schemes.Convexity.Concave,
                    minima=0,
                    maxima=1,
                )
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.InteriorBlowupIncomplete,
                theorem_ref="meangauss/c=1,0<a<1,-(1+sqrt(1-a^2))/2<b<-a/2",
                contact_angle=_contact(
                    schemes.ContactEquation.MeanGaussUnitBlowup, coefficients, schemes.AngleRole.Blowup
                ),
                complete=False,
                graph_over_l=True,
                self_intersects=False,
                convexity=schemes.Convexity.Concave,
                minima=0,
                maxima=1,
            )
        if a - 2 * b > 0:
            return schemes.ClassificationVerdict(
                shape_class=ShapeClass.PeriodicSelfIntersecting,
                theorem_ref="meangauss/c=1,0<a<1,|2b|<a",
                complete=True,
                periodic=True,
                graph_over_l=False,
                asymptotic_boundary=Boundary.PointInfinity,
                self_intersects=True,
                convexity=schemes.Convexity.Mixed,
                note="one maximum and one minimum in each period",
            )
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.InteriorBlowupIncomplete,
            theorem_ref="meangauss/c=1,0<a<1,a-2b<=0",
            contact_angle=_contact(schemes.ContactEquation.MeanGaussUnitBlowup, coefficients, schemes.AngleRole.Blowup),
            complete=False,
            graph_over_l=False,
            minima=1,
            maxima=0,
        )

    if a + 2 * b < 0:
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.ConvexGraphIncomplete,
            theorem_ref="meangauss/c=1,a>1,a+2b<0",
            contact_angle=_contact(schemes.ContactEquation.MeanGaussUnitBlowup, coefficients, schemes.AngleRole.Blowup),
            complete=False,
            graph_over_l=True,
            self_intersects=False,
            convexity=schemes.Convexity.Convex,
            minima=1,
            maxima=0,
        )
    if b >= -1.0:
        return schemes.ClassificationVerdict(
            shape_class=ShapeClass.ConcaveGraphToBoundary,
            theorem_ref="meangauss/c=1,a>1,a+2b>0,b>=-1",
            contact_angle=_contact(schemes.ContactEquation.MeanGaussUnitContact, coefficients),
            complete=True,
            graph_over_l=True,
            asymptotic_boundary=Boundary.TwoTangentCircles,
            self_intersects=False,
            convexity=schemes.Convexity.Concave,
            minima=0,
            maxima=1,
        )
    # with b < -1 the contact root has cos(theta) < 0, e.g. cos = -0.1196 for (4, -1.5, 1): the profile
    # passes a vertical tangent before meeting L and is not a graph over it.
    return schemes.ClassificationVerdict(
        shape_class=ShapeClass.NotAGraphToBoundary,
        theorem_ref="meangauss/c=1,a>1,a+2b>0,b<-1",
        contact_angle=_contact(schemes.ContactEquation.MeanGaussUnitContact, coefficients),
        complete=True,
        graph_over_l=False,
        asymptotic_boundary=Boundary.TwoTangentCircles,
        minima=0,
        maxima=1,
    )


def classify(relation: schemes.WeingartenRelation, theta0: float = 0.0) -> schemes.ClassificationVerdict:
    if relation.kind is schemes.RelationKind.PrincipalLinear:
        verdict = classify_principal(relation, theta0)
    else:
        verdict = classify_meangauss(relation, theta0)
    logger.debug("%s, theta0=%r -> %s (%s)", relation.label(), theta0, verdict.shape_class.value, verdict.theorem_ref)
    return verdict


def _cos_polynomial(equation: schemes.ContactEquation, coefficients: dict[str, float]) -> Polynomial:
    """Each contact equation as a polynomial in u = cos(theta1)."""
    match equation:
        case schemes.ContactEquation.PrincipalContact:
            m, n = coefficients["m"], coefficients["n"]
            return Polynomial([n, m - 1.0])
        case schemes.ContactEquation.MeanGaussZeroContact:
            b = coefficients["b"]
            return Polynomial([-b, 2.0, b])
        case schemes.ContactEquation.MeanGaussZeroBlowup:
            b = coefficients["b"]
            return Polynomial([1.0, b])
        case schemes.ContactEquation.MeanGaussUnitContact:
            a, b = coefficients["a"], coefficients["b"]
            return Polynomial([-(1.0 + b), a, b])
        case schemes.ContactEquation.MeanGaussUnitBlowup:
            a, b = coefficients["a"], coefficients["b"]
            return Polynomial([a, 2.0 * b])
    raise exceptions.ContractViolation(f"unknown contact equation {equation!r}")


def _polish(poly: Polynomial, u: float) -> float:
    """Newton refinement of a companion-matrix root; kept only if it lowers |p(u)|."""
    derivative = poly.deriv()
    if float(derivative(u)) == 0.0:
        return u
    polished = float(optimize.newton(poly, u, fprime=derivative, tol=ROOT_TOL, maxiter=50, disp=False))
    return polished if abs(float(poly(polished))) <= abs(float(poly(u))) else u


def contact_angle_root(equation: schemes.ContactEquation, coefficients: dict[str, float]) -> float:
    """
    Solve a contact or blow-up angle equation for theta1 in [0, pi].
    The admissible root with the largest cos(theta1), the first one met by a monotone angle, is selected.
    Args:
        equation (schemes.ContactEquation): equation tag from a verdict.
        coefficients (dict[str, float]): relation parameters named in the tag.
    Returns:
        float: theta1 = arccos(u).
    Raises:
        exceptions.ContactAngleInconsistency: If no root lies in [-1, 1].
    """
    poly = _cos_polynomial(equation, coefficients).trim()
    if poly.degree() < 1:
        raise exceptions.ContactAngleInconsistency(f"{equation.value} degenerates for {coefficients}")

    if poly.degree() == 2:
        c0, c1, c2 = poly.coef
        discriminant = c1 * c1 - 4.0 * c2 * c0
        if abs(discriminant) <= ROOT_TOL * max(1.0, c1 * c1 + abs(4.0 * c2 * c0)):
            candidates = np.array([-c1 / (2.0 * c2)])
        elif discriminant < 0:
            candidates = np.array([])
        else:
            candidates = np.real(poly.roots())
    else:
        candidates = np.real(poly.roots())

    admissible = [float(u) for u in candidates if -1.0 - 1e-9 <= u <= 1.0 + 1e-9]
    if not admissible:
        raise exceptions.ContactAngleInconsistency(f"{equation.value} has no root with |cos| <= 1 for {coefficients}")
    u = _polish(poly, max(admissible))
    return math.acos(min(1.0, max(-1.0, u)))
