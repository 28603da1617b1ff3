import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.weingarten.schemes.relations import WeingartenRelation

__all__ = [
    "ParabolicMesh",
    "CurvatureAudit",
]


class ParabolicMesh(BaseModel):
    """
    Vertex grid of the surface (x(s), t, z(s)) swept along horosphere translations.
    vertices has shape (len(s), len(t), 3); per-row curvature arrays follow s.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    relation: WeingartenRelation
    s: np.ndarray
    t: np.ndarray
    theta: np.ndarray
    vertices: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    h: np.ndarray
    k: np.ndarray
    clamped_rows: list[int] = Field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.s.size), int(self.t.size)


class CurvatureAudit(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: int
    max_kappa1_deviation: float
    max_kappa2_deviation: float
    max_relation_residual: float
