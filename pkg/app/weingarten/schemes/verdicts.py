from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic.alias_generators import to_camel

from app.weingarten.schemes.traces import Direction

__all__ = [
    "ShapeClass",
    "AsymptoticBoundary",
    "ContactEquation",
    "AngleRole",
    "Convexity",
    "Monotonicity",
    "EndBehavior",
    "CompleteEvidence",
    "ExtremumKind",
    "ContactAngle",
    "ClassificationVerdict",
    "Extremum",
    "SelfIntersection",
    "Period",
    "TraceFeatures",
    "PredicateResult",
    "ReconciliationReport",
]


class ShapeClass(str, Enum):
    UmbilicalTrivial = "UmbilicalTrivial"
    ConstantPrincipalCurvature = "ConstantPrincipalCurvature"
    CMCTrivial = "CMCTrivial"
    ConstantGaussTrivial = "ConstantGaussTrivial"
    Horosphere = "Horosphere"
    GeodesicPlane = "GeodesicPlane"
    EquidistantSurface = "EquidistantSurface"
    PeriodicSelfIntersecting = "PeriodicSelfIntersecting"
    MinimumWithSelfIntersections = "MinimumWithSelfIntersections"
    ConvexGraph = "ConvexGraph"
    ConcaveGraphToBoundary = "ConcaveGraphToBoundary"
    NotAGraphToBoundary = "NotAGraphToBoundary"
    ConvexGraphIncomplete = "ConvexGraphIncomplete"
    InteriorBlowupIncomplete = "InteriorBlowupIncomplete"
    EuclideanCircle = "EuclideanCircle"
    AsymptoticToBoundary = "AsymptoticToBoundary"
    Undetermined = "Undetermined"


class AsymptoticBoundary(str, Enum):
    PointInfinity = "PointInfinity"
    OneCircle = "OneCircle"
    TwoTangentCircles = "TwoTangentCircles"
    Undetermined = "Undetermined"


class ContactEquation(str, Enum):
    PrincipalContact = "cos(t1) = -n/(m-1)"
    MeanGaussZeroContact = "2cos(t1) - b sin^2(t1) = 0"
    MeanGaussZeroBlowup = "1 + b cos(t1) = 0"
    MeanGaussUnitContact = "a cos(t1) - b sin^2(t1) - 1 = 0"
    MeanGaussUnitBlowup = "a + 2b cos(t1) = 0"


class AngleRole(str, Enum):
    Contact = "contact"
    Blowup = "blowup"
    Asymptotic = "asymptotic"


class Convexity(str, Enum):
    Convex = "convex"
    Concave = "concave"
    Flat = "flat"
    Mixed = "mixed"


class Monotonicity(str, Enum):
    Increasing = "increasing"
    Decreasing = "decreasing"
    Constant = "constant"
    Mixed = "mixed"


class EndBehavior(str, Enum):
    Contact = "contact"
    Blowup = "blowup"
    Decay = "decay"
    Escape = "escape"
    Periodic = "periodic"
    Undetermined = "undetermined"


class CompleteEvidence(str, Enum):
    PeriodicExtension = "periodic_extension"
    BoundaryContactBothEnds = "boundary_contact_both_ends"
    BlowupDetected = "blowup_detected"
    WindowExhausted = "window_exhausted"


class ExtremumKind(str, Enum):
    Minimum = "min"
    Maximum = "max"


class _CamelModel(BaseModel):
    model_config = ConfigDict(frozen=True, alias_generator=to_camel, populate_by_name=True)

    def to_json(self) -> dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


class ContactAngle(_CamelModel):
    equation: ContactEquation
    role: AngleRole = AngleRole.Contact
    coefficients: dict[str, float]
    root: float | None = None


class ClassificationVerdict(_CamelModel):
    """
    Closed form prediction for a relation and an initial angle.
    complete and graph_over_l are None when nothing is asserted.
    """

    shape_class: ShapeClass
    theorem_ref: str
    contact_angle: ContactAngle | None = None
    complete: bool | None = None
    periodic: bool = False
    graph_over_l: bool | None = None
    asymptotic_boundary: AsymptoticBoundary = AsymptoticBoundary.Undetermined
    asymptotic_inferred: bool = False
    self_intersects: bool | None = None
    convexity: Convexity | None = None
    minima: int | None = None
    maxima: int | None = None
    family: list[ShapeClass] = Field(default_factory=list)
    note: str | None = None

    @property
    def vacuous(self) -> bool:
        return self.shape_class in (
            ShapeClass.Undetermined,
            ShapeClass.UmbilicalTrivial,
            ShapeClass.ConstantPrincipalCurvature,
            ShapeClass.CMCTrivial,
            ShapeClass.ConstantGaussTrivial,
        )


class Extremum(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: float
    x: float
    z: float
    kind: ExtremumKind


class SelfIntersection(BaseModel):
    model_config = ConfigDict(frozen=True)

    s_first: float
    s_second: float
    x: float
    z: float


class Period(BaseModel):
    """
    Attributes:
        length: arc length period T.
        translation: horizontal shift x(s + T) - x(s).
        max_z_defect: worst |z(s + T) - z(s)| over the checked window.
        max_theta_defect: worst |theta(s + T) - theta(s) - 2pi| over the checked window.
    """

    model_config = ConfigDict(frozen=True)

    length: float
    translation: float
    max_z_defect: float
    max_theta_defect: float


class TraceFeatures(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_monotone: Monotonicity
    self_intersection: SelfIntersection | None = None
    graph_over_l: bool
    convexity: Convexity
    extrema: list[Extremum] = Field(default_factory=list)
    period: Period | None = None
    contact_angles: dict[Direction, float] = Field(default_factory=dict)
    blowup_angles: dict[Direction, float] = Field(default_factory=dict)
    end_angles: dict[Direction, float] = Field(default_factory=dict)
    ends: dict[Direction, EndBehavior] = Field(default_factory=dict)
    end_x: dict[Direction, float] = Field(default_factory=dict)
    end_z: dict[Direction, float] = Field(default_factory=dict)
    complete_evidence: CompleteEvidence = CompleteEvidence.WindowExhausted
    asymptotic_boundary: AsymptoticBoundary = AsymptoticBoundary.Undetermined
    asymptotic_inferred: bool = False

    @model_validator(mode="after")
    def _graph_excludes_crossings(self) -> "TraceFeatures":
        if self.graph_over_l and self.self_intersection is not None:
            raise ValueError("a graph over the axis can not self-intersect")
        return self

    @property
    def self_intersects(self) -> bool:
        return self.self_intersection is not None

    @property
    def minima(self) -> list[Extremum]:
        return [e for e in self.extrema if e.kind is ExtremumKind.Minimum]

    @property
    def maxima(self) -> list[Extremum]:
        return [e for e in self.extrema if e.kind is ExtremumKind.Maximum]


class PredicateResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    predicted: Any = None
    measured: Any = None
    passed: bool
    deviation: float | None = None


class ReconciliationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool
    vacuous: bool = False
    predicates: list[PredicateResult] = Field(default_factory=list)
    verdict: ClassificationVerdict
    features: TraceFeatures

    @property
    def failures(self) -> list[PredicateResult]:
        return [p for p in self.predicates if not p.passed]
