import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.settings import settings

__all__ = [
    "RelationKind",
    "TrivialKind",
    "WeingartenRelation",
    "ProfileState",
    "CurvaturePair",
    "InitialData",
    "StepOptions",
    "CIRCLE_LOCUS_EPS",
]

CIRCLE_LOCUS_EPS = 1e-12


class RelationKind(str, Enum):
    PrincipalLinear = "principal_linear"
    MeanGauss = "mean_gauss"


class TrivialKind(str, Enum):
    Umbilical = "umbilical"
    ConstantMeanCurvature = "constant_mean_curvature"
    Minimal = "minimal"
    ConstantGauss = "constant_gauss"


class WeingartenRelation(BaseModel):
    """
    Normalized parameters of the governing relation.
    PrincipalLinear: kappa1 = m * kappa2 + n with m != 0 and n >= 0.
    MeanGauss: a * H + b * K = c with c in {0, 1}; c = 0 stores a = 2, c = 1 stores a >= 0.
    The only MeanGauss relation with a = 0 is the constant Gauss curvature one.
    """

    model_config = ConfigDict(frozen=True)

    kind: RelationKind
    m: float | None = None
    n: float | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None
    orientation_flipped: bool = False

    @model_validator(mode="after")
    def _check_normal_form(self) -> "WeingartenRelation":
        if self.kind is RelationKind.PrincipalLinear:
            if self.m is None or self.n is None:
                raise ValueError("principal-linear relation needs m and n")
            if self.m == 0:
                raise ValueError("m must be non-zero")
            if self.n < 0:
                raise ValueError("n must be non-negative after normalization")
        else:
            if self.a is None or self.b is None or self.c is None:
                raise ValueError("mean-Gauss relation needs a, b and c")
            if self.c not in (0.0, 1.0):
                raise ValueError("c must be normalized to 0 or 1")
            if self.c == 0.0 and self.a not in (0.0, 2.0):
                raise ValueError("c = 0 requires a = 2")
            if self.c == 1.0 and self.a < 0:
                raise ValueError("c = 1 requires a >= 0")
            if self.a == 0.0 and self.b == 0.0:
                raise ValueError("a and b can not both vanish")
        return self

    @property
    def raw_coefficients(self) -> tuple[float, float, float]:
        """(a, b, c) of a*kappa1 + b*kappa2 = c or a*H + b*K = c."""
        if self.kind is RelationKind.PrincipalLinear:
            return 1.0, -self.m, self.n  # type: ignore[operator]
        return self.a, self.b, self.c  # type: ignore[return-value]

    @property
    def coefficient_scale(self) -> float:
        a, b, c = self.raw_coefficients
        return 1.0 + abs(a) + abs(b) + abs(c)

    @property
    def trivial(self) -> TrivialKind | None:
        if self.kind is RelationKind.PrincipalLinear:
            if self.m == 1.0 and self.n == 0.0:
                return TrivialKind.Umbilical
            if self.m == -1.0:
                return TrivialKind.ConstantMeanCurvature
            return None
        if self.a == 0.0:
            return TrivialKind.ConstantGauss
        if self.b == 0.0:
            return TrivialKind.Minimal if self.c == 0.0 else TrivialKind.ConstantMeanCurvature
        return None

    @property
    def on_circle_locus(self) -> bool:
        if self.kind is not RelationKind.MeanGauss or self.c != 1.0:
            return False
        a, b = self.a, self.b
        return abs(a * a + 4 * b * b + 4 * b) <= CIRCLE_LOCUS_EPS  # type: ignore[operator]

    def label(self) -> str:
        if self.kind is RelationKind.PrincipalLinear:
            return f"kappa1 = {self.m!r} kappa2 + {self.n!r}"
        return f"{self.a!r} H + {self.b!r} K = {self.c!r}"


class ProfileState(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: float
    x: float
    z: float
    theta: float


class CurvaturePair(BaseModel):
    model_config = ConfigDict(frozen=True)

    kappa1: float
    kappa2: float
    h: float
    k: float


class InitialData(BaseModel):
    model_config = ConfigDict(frozen=True)

    z0: float = Field(default=1.0, gt=0)
    theta0: float = 0.0

    @property
    def x0(self) -> float:
        return 0.0


class StepOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default_factory=lambda: settings.REL_TOL, gt=0, lt=1)
    abs_tol: float = Field(default_factory=lambda: settings.ABS_TOL, gt=0)
    max_arclength: float = Field(default_factory=lambda: settings.MAX_ARCLENGTH, gt=0)
    blowup_switch: float = Field(default_factory=lambda: settings.BLOWUP_SWITCH, gt=0)
    boundary_eps: float = Field(default_factory=lambda: settings.BOUNDARY_EPS, gt=0, lt=1)
    max_states: int = Field(default_factory=lambda: settings.MAX_STATES, ge=16)
    degeneracy_eps: float = Field(default_factory=lambda: settings.DEGENERACY_EPS, ge=0)
    method: str = Field(default_factory=lambda: settings.ODE_METHOD, pattern="^(RK45|DOP853|RK23)$")
    max_step: float = Field(default=math.inf, gt=0)
