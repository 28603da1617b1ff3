from enum import Enum
from typing import Any, Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.weingarten.schemes.relations import InitialData, ProfileState, StepOptions, WeingartenRelation

__all__ = [
    "Direction",
    "EventKind",
    "Phase",
    "IntegrationEvent",
    "Trace",
]


class Direction(str, Enum):
    Forward = "forward"
    Backward = "backward"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.Forward else -1


class EventKind(str, Enum):
    AngleCrossing = "angle_crossing"
    BoundaryContact = "boundary_contact"
    SlopeBlowup = "slope_blowup"
    StraightLineDegenerate = "straight_line_degenerate"
    PeriodClosed = "period_closed"
    MaxArclength = "max_arclength"
    StepFailure = "step_failure"


class Phase(int, Enum):
    """Independent variable the state was produced with."""

    ArcLength = 0
    Angle = 1


class IntegrationEvent(BaseModel):
    """
    A located event along one branch of the profile.
    Attributes:
        payload: kind specific value, the crossed multiple index for AngleCrossing and PeriodClosed,
            the contact angle for BoundaryContact, the blow-up angle for SlopeBlowup.
    """

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    kind: EventKind
    direction: Direction | None = None
    s: float
    x: float
    z: float
    theta: float
    payload: float | None = None
    terminal: bool = False


class Trace(BaseModel):
    """
    Sampled profile curve sorted by increasing arc length, both branches joined at s = 0.
    theta_prime holds +-inf at a blow-up state.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    relation: WeingartenRelation
    init: InitialData
    options: StepOptions
    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    theta_prime: np.ndarray
    phase: np.ndarray
    events: list[IntegrationEvent] = Field(default_factory=list)
    terminal: dict[Direction, IntegrationEvent] = Field(default_factory=dict)
    degenerate: bool = False
    metadata: dict[str, Any] = Field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.s.size)

    @property
    def origin_index(self) -> int:
        return int(np.argmin(np.abs(self.s)))

    def state(self, index: int) -> ProfileState:
        return ProfileState(
            s=float(self.s[index]),
            x=float(self.x[index]),
            z=float(self.z[index]),
            theta=float(self.theta[index]),
        )

    def states(self) -> Iterator[ProfileState]:
        for i in range(len(self)):
            yield self.state(i)

    def branch(self, direction: Direction) -> np.ndarray:
        """Indices of one branch ordered away from s = 0, the origin included."""
        origin = self.origin_index
        if direction is Direction.Forward:
            return np.arange(origin, len(self))
        return np.arange(origin, -1, -1)

    def events_of(self, kind: EventKind, direction: Direction | None = None) -> list[IntegrationEvent]:
        return [e for e in self.events if e.kind is kind and (direction is None or e.direction is direction)]

    def boundary_rows(self) -> list[int]:
        """Indices of the terminal states that reached the ideal boundary."""
        last = {Direction.Backward: 0, Direction.Forward: len(self) - 1}
        return sorted(
            {last[d] for d, event in self.terminal.items() if event.kind is EventKind.BoundaryContact and len(self) > 1}
        )

    def terminal_kind(self, direction: Direction) -> EventKind | None:
        event = self.terminal.get(direction)
        return event.kind if event is not None else None

    @property
    def s_extent(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])
