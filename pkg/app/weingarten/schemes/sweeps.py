from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.weingarten.schemes.relations import InitialData, RelationKind, StepOptions
from app.weingarten.schemes.verdicts import ShapeClass, TraceFeatures

__all__ = [
    "Axis",
    "SweepSpec",
    "SweepCell",
    "BoundarySample",
    "PhaseDiagram",
    "SweepManifest",
    "B0Result",
]


class Axis(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: Literal["m", "n", "a", "b", "theta0"]
    start: float
    stop: float
    count: int = Field(ge=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


class SweepSpec(BaseModel):
    """
    A rectangular grid over two relation parameters.
    Parameters not on an axis come from fixed; c defaults to 0 for mean-Gauss sweeps.
    """

    model_config = ConfigDict(frozen=True)

    kind: RelationKind
    axes: tuple[Axis, Axis]
    fixed: dict[str, float] = Field(default_factory=dict)
    init: InitialData = Field(default_factory=InitialData)
    options: StepOptions | None = None
    integrate: bool = True
    write_traces: bool = False
    neighbours: bool = True
    workers: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_axes(self) -> "SweepSpec":
        names = {axis.name for axis in self.axes}
        if len(names) != 2:
            raise ValueError("sweep axes must name two different parameters")
        allowed = {"m", "n", "theta0"} if self.kind is RelationKind.PrincipalLinear else {"a", "b", "theta0"}
        if not names <= allowed:
            raise ValueError(f"axes {sorted(names)} do not fit a {self.kind.value} sweep")
        return self


class SweepCell(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int
    j: int
    params: dict[str, float]
    shape_class: ShapeClass
    theorem_ref: str
    on_boundary: bool = False
    neighbour_classes: list[ShapeClass] = Field(default_factory=list)
    reconciled: bool | None = None
    contact_angle: float | None = None
    measured_angle: float | None = None
    period: float | None = None
    failure: str | None = None


class BoundarySample(BaseModel):
    model_config = ConfigDict(frozen=True)

    axis: str
    first: tuple[int, int]
    second: tuple[int, int]
    classes: tuple[ShapeClass, ShapeClass]
    midpoint: dict[str, float]


class PhaseDiagram(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: SweepSpec
    cells: list[SweepCell]
    boundaries: list[BoundarySample] = Field(default_factory=list)

    def cell(self, i: int, j: int) -> SweepCell:
        return self.cells[i * self.spec.axes[1].count + j]

    def class_grid(self) -> list[list[ShapeClass]]:
        rows, cols = self.spec.axes[0].count, self.spec.axes[1].count
        return [[self.cells[i * cols + j].shape_class for j in range(cols)] for i in range(rows)]


class SweepManifest(BaseModel):
    spec_hash: str
    created_at: str
    wall_time: float
    cells: int
    failures: int
    tolerances: dict[str, float]
    label: str = "classification sweep"
    output: Path | None = None


class B0Result(BaseModel):
    """
    Bisection bracket of the self-intersection threshold; an empirical value, not a proved one.
    lower_features and upper_features summarize the traces at the final bracket ends.
    """

    model_config = ConfigDict(frozen=True)

    b0: float
    lower: float
    upper: float
    intersects_at_lower: bool
    intersects_at_upper: bool
    iterations: int
    tolerance: float
    label: str = "empirical"
    evaluations: list[tuple[float, bool]] = Field(default_factory=list)
    lower_features: TraceFeatures | None = None
    upper_features: TraceFeatures | None = None
