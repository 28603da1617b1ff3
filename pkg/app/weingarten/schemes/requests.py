from pydantic import BaseModel, ConfigDict, Field

from app.weingarten.schemes.relations import RelationKind

__all__ = [
    "ClassifyRequest",
    "VerifyRequest",
    "VerifyResponse",
]


class ClassifyRequest(BaseModel):
    """Raw coefficients of a*kappa1 + b*kappa2 = c or a*H + b*K = c."""

    model_config = ConfigDict(use_enum_values=False)

    kind: RelationKind
    a: float
    b: float
    c: float = 0.0
    theta0: float = 0.0


class VerifyRequest(ClassifyRequest):
    z0: float = Field(default=1.0, gt=0)
    max_arclength: float | None = Field(default=None, gt=0, le=200)


class VerifyResponse(BaseModel):
    verdict: dict
    passed: bool
    vacuous: bool
    failures: list[str]
    s_extent: tuple[float, float]
    states: int
