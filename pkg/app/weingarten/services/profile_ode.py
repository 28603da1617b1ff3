import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import OdeSolution, solve_ivp
from scipy.interpolate import BPoly

from app.settings import settings
from app.weingarten import schemes
from app.weingarten.schemes import Direction, EventKind, Phase
from app.weingarten.services.hyperbolic import curvatures_at
from app.weingarten.utils import exceptions
from app.weingarten.utils.managers import AbstractRelationManager, get_manager

__all__ = [
    "rhs",
    "rhs_principal",
    "rhs_meangauss",
    "theta_second",
    "integrate",
    "ProfileIntegrator",
    "HermiteProfile",
    "max_residual",
    "integrate_segment",
    "first_integral_check",
    "second_derivative_check",
    "symmetry_defect",
]

logger = logging.getLogger(__name__)

MAX_PHASE_SWITCHES = 16
EVENT_S_EPS = 1e-12
FIRST_INTEGRAL_MIN_HEIGHT = 0.1
GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)
SEGMENT_REL_TOL = 1e-12
SEGMENT_ABS_TOL = 1e-14


def _require_positive_height(state: schemes.ProfileState) -> None:
    if state.z <= 0:
        raise exceptions.DomainException(f"height must be positive, got z={state.z!r}")


def rhs_principal(state: schemes.ProfileState, relation: schemes.WeingartenRelation) -> float:
    """theta' = ((m - 1) cos(theta) + n) / z."""
    if relation.kind is not schemes.RelationKind.PrincipalLinear:
        raise exceptions.ContractViolation("rhs_principal needs a principal-linear relation")
    _require_positive_height(state)
    return ((relation.m - 1.0) * math.cos(state.theta) + relation.n) / state.z  # type: ignore[operator]


def rhs_meangauss(state: schemes.ProfileState, relation: schemes.WeingartenRelation) -> float:
    """
    theta' of a H + b K = c, reduced on the circle locus.
    Raises:
        exceptions.SlopeBlowupSignal: If the denominator a / 2 + b cos(theta) vanishes.
    """
    if relation.kind is not schemes.RelationKind.MeanGauss:
        raise exceptions.ContractViolation("rhs_meangauss needs a mean-Gauss relation")
    _require_positive_height(state)
    manager = get_manager(relation)
    denominator = float(manager.denominator(state.theta))
    if denominator == 0.0:
        raise exceptions.SlopeBlowupSignal(f"denominator vanishes at theta={state.theta!r}")
    return float(manager.numerator(state.theta)) / (state.z * denominator)


def rhs(state: schemes.ProfileState, relation: schemes.WeingartenRelation) -> float:
    if relation.kind is schemes.RelationKind.PrincipalLinear:
        return rhs_principal(state, relation)
    return rhs_meangauss(state, relation)


def theta_second(state: schemes.ProfileState, relation: schemes.WeingartenRelation) -> float:
    """theta'' along the solution through state, from differentiating the governing equation."""
    _require_positive_height(state)
    return float(get_manager(relation).theta_second(state.z, state.theta))


@dataclass
class _Branch:
    """States of one integration direction, ordered away from s = 0."""

    s: list[float] = field(default_factory=list)
    x: list[float] = field(default_factory=list)
    z: list[float] = field(default_factory=list)
    theta: list[float] = field(default_factory=list)
    phase: list[int] = field(default_factory=list)
    events: list[schemes.IntegrationEvent] = field(default_factory=list)
    terminal: schemes.IntegrationEvent | None = None
    switches: int = 0
    truncated: bool = False
    message: str | None = None

    def extend(self, s, x, z, theta, phase: Phase, skip_first: bool) -> None:
        start = 1 if skip_first else 0
        self.s.extend(np.asarray(s, dtype=float)[start:].tolist())
        self.x.extend(np.asarray(x, dtype=float)[start:].tolist())
        self.z.extend(np.asarray(z, dtype=float)[start:].tolist())
        self.theta.extend(np.asarray(theta, dtype=float)[start:].tolist())
        self.phase.extend([int(phase)] * (len(np.asarray(s)) - start))

    def last(self) -> tuple[float, float, float, float]:
        return self.s[-1], self.x[-1], self.z[-1], self.theta[-1]


def _event(fn: Callable, terminal: bool, direction: float = 0.0) -> Callable:
    fn.terminal = terminal  # type: ignore[attr-defined]
    fn.direction = direction  # type: ignore[attr-defined]
    return fn


class ProfileIntegrator:
    """
    Integrates the generating curve x' = cos(theta), z' = sin(theta), theta' = N / (z D) in both
    arc length directions from (0, z0, theta0).
    Near a zero of D the independent variable switches to theta, where ds/dtheta = z D / N is regular,
    and switches back once |theta'| falls below half the switch threshold.
    """

    def __init__(
        self,
        relation: schemes.WeingartenRelation,
        init: schemes.InitialData,
        options: schemes.StepOptions | None = None,
    ):
        self.relation = relation
        self.init = init
        self.options = options or schemes.StepOptions()
        self.manager: AbstractRelationManager = get_manager(relation)
        self.boundary_height = self.options.boundary_eps * init.z0
        self.can_blow_up = self.manager.blowup_cos() is not None

    def _slope(self, z: float, theta: float) -> float:
        return float(self.manager.numerator(theta)) / (z * float(self.manager.denominator(theta)))

    def run(self) -> schemes.Trace:
        """
        Returns:
            schemes.Trace: both branches joined at s = 0.
        Raises:
            exceptions.StepFailureException: If the stepper fails without a recognized event, the partial
            trace is attached.
        """
        theta0, z0 = self.init.theta0, self.init.z0
        denominator = float(self.manager.denominator(theta0))
        if denominator == 0.0:
            return self._initial_blowup()
        slope0 = self._slope(z0, theta0)
        if abs(slope0) <= self.options.degeneracy_eps:
            return self._straight_line()

        branches = {direction: self._integrate_branch(direction) for direction in Direction}
        trace = self._assemble(branches)
        failed = [d for d, b in branches.items() if b.terminal and b.terminal.kind is EventKind.StepFailure]
        if failed:
            messages = "; ".join(f"{d.value}: {branches[d].message}" for d in failed)
            raise exceptions.StepFailureException(f"integration failed ({messages})", trace=trace)
        return trace

    def _integrate_branch(self, direction: Direction) -> _Branch:
        branch = _Branch()
        branch.extend([0.0], [self.init.x0], [self.init.z0], [self.init.theta0], Phase.ArcLength, skip_first=False)
        threshold = 0.75 * self.options.blowup_switch
        while True:
            _, _, z, theta = branch.last()
            try:
                if self.can_blow_up and abs(self._slope(z, theta)) >= threshold:
                    self._angle_phase(branch, direction)
                else:
                    self._arclength_phase(branch, direction)
            except (ZeroDivisionError, ValueError) as exc:
                self._finish(branch, direction, EventKind.StepFailure, f"right hand side failed: {exc}")
            if len(branch.s) > self.options.max_states:
                self._truncate(branch, direction)
            if branch.terminal is not None:
                return branch
            branch.switches += 1
            if branch.switches > MAX_PHASE_SWITCHES:
                branch.message = f"more than {MAX_PHASE_SWITCHES} changes of independent variable"
                branch.terminal = self._make_event(EventKind.StepFailure, direction, *branch.last(), terminal=True)
                return branch

    def _truncate(self, branch: _Branch, direction: Direction) -> None:
        limit = self.options.max_states
        logger.warning("%s: %s branch truncated at %d states", self.relation.label(), direction.value, limit)
        for name in ("s", "x", "z", "theta", "phase"):
            del getattr(branch, name)[limit:]
        s_last = branch.s[-1]
        branch.events = [e for e in branch.events if abs(e.s) <= abs(s_last)]
        branch.truncated = True
        branch.terminal = self._make_event(EventKind.MaxArclength, direction, *branch.last(), terminal=True)

    def _make_event(
        self,
        kind: EventKind,
        direction: Direction | None,
        s: float,
        x: float,
        z: float,
        theta: float,
        payload: float | None = None,
        terminal: bool = False,
    ) -> schemes.IntegrationEvent:
        return schemes.IntegrationEvent(
            kind=kind,
            direction=direction,
            s=float(s),
            x=float(x),
            z=float(z),
            theta=float(theta),
            payload=None if payload is None else float(payload),
            terminal=terminal,
        )

    def _crossing_events(
        self,
        branch: _Branch,
        direction: Direction,
        found: list[tuple[float, float, float, float]],
    ) -> None:
        """Record angle crossings at multiples of pi/2 and the full turns among them."""
        base = self.init.theta0 / (math.pi / 2)
        base_index = round(base) if abs(base - round(base)) <= 1e-12 else None
        for s, x, z, theta in found:
            if abs(s) <= EVENT_S_EPS:
                continue
            multiple = round(theta / (math.pi / 2))
            branch.events.append(self._make_event(EventKind.AngleCrossing, direction, s, x, z, theta, multiple))
            if base_index is not None and multiple != base_index and (multiple - base_index) % 4 == 0:
                turns = (multiple - base_index) // 4
                branch.events.append(self._make_event(EventKind.PeriodClosed, direction, s, x, z, theta, turns))

    def _contact_angle(self, z: float, theta: float) -> float:
        """One linear step in z from the boundary state to z = 0."""
        denominator = float(self.manager.denominator(theta))
        sin_theta = math.sin(theta)
        if denominator == 0.0 or sin_theta == 0.0:
            return theta
        return theta - float(self.manager.numerator(theta)) / (denominator * sin_theta)

    def _contact_slope(self, slope_before: float, z_before: float, z_end: float, contact: float) -> float:
        """
        theta' at a boundary state, carried over from the last regular state with the contact exponent.
        At z = boundary_eps * z0 the numerator N is at rounding level and N / (z D) has no reliable sign.
        """
        exponent = self.manager.contact_exponent(contact)
        if not (math.isfinite(exponent) and exponent > 0 and math.isfinite(slope_before) and z_before > 0):
            return float(slope_before)
        value = slope_before * (z_end / z_before) ** (exponent - 1.0)
        if value == 0.0 or not math.isfinite(value):
            # underflow or overflow of the power, keep the sign
            return math.copysign(np.finfo(float).tiny if value == 0.0 else np.finfo(float).max, slope_before)
        return float(value)

    def _finish(self, branch: _Branch, direction: Direction, kind: EventKind, message: str | None = None) -> None:
        s, x, z, theta = branch.last()
        payload: float | None = None
        if kind is EventKind.BoundaryContact:
            payload = self._contact_angle(z, theta)
        elif kind is EventKind.SlopeBlowup:
            payload = theta
        branch.message = message
        branch.terminal = self._make_event(kind, direction, s, x, z, theta, payload, terminal=True)

    def _arclength_phase(self, branch: _Branch, direction: Direction) -> None:
        """Integrate in s from the last state until a terminal event or the blow-up switch."""
        s_start, x_start, z_start, theta_start = branch.last()
        switch = self.options.blowup_switch
        manager = self.manager

        def fun(s, y):
            return [math.cos(y[2]), math.sin(y[2]), self._slope(y[1], y[2])]

        events = [
            _event(lambda s, y: y[1] - self.boundary_height, terminal=True, direction=-1),
            _event(lambda s, y: math.sin(2.0 * y[2]), terminal=False),
        ]
        if self.can_blow_up:
            events.append(
                _event(
                    lambda s, y: switch * y[1] * abs(float(manager.denominator(y[2])))
                    - abs(float(manager.numerator(y[2]))),
                    terminal=True,
                    direction=-1,
                )
            )

        sol = solve_ivp(
            fun,
            (s_start, direction.sign * self.options.max_arclength),
            [x_start, z_start, theta_start],
            method=self.options.method,
            rtol=self.options.rel_tol,
            atol=self.options.abs_tol,
            max_step=self.options.max_step,
            events=events,
        )
        branch.extend(sol.t, sol.y[0], sol.y[1], sol.y[2], Phase.ArcLength, skip_first=True)
        crossings = [(float(s), *map(float, y)) for s, y in zip(sol.t_events[1], sol.y_events[1])]
        self._crossing_events(branch, direction, [c for c in crossings if abs(c[0] - s_start) > EVENT_S_EPS])

        if sol.status == -1:
            self._finish(branch, direction, EventKind.StepFailure, sol.message)
        elif sol.status == 0:
            self._finish(branch, direction, EventKind.MaxArclength)
        elif sol.t_events[0].size:
            self._finish(branch, direction, EventKind.BoundaryContact)

    def _angle_phase(self, branch: _Branch, direction: Direction) -> None:
        """Integrate (s, x, z) in theta from the last state until a terminal event or the switch back."""
        s_start, x_start, z_start, theta_start = branch.last()
        slope_sign = math.copysign(1.0, self._slope(z_start, theta_start))
        theta_end = theta_start + direction.sign * slope_sign * math.pi
        switch_back = 0.5 * self.options.blowup_switch
        manager = self.manager
        max_arclength = self.options.max_arclength

        def fun(theta, y):
            ds = y[2] * float(manager.denominator(theta)) / float(manager.numerator(theta))
            return [ds, math.cos(theta) * ds, math.sin(theta) * ds]

        events = [
            _event(lambda t, y: float(manager.denominator(t)), terminal=True),
            _event(lambda t, y: y[2] - self.boundary_height, terminal=True, direction=-1),
            _event(lambda t, y: abs(y[0]) - max_arclength, terminal=True, direction=1),
            _event(
                lambda t, y: abs(float(manager.numerator(t))) - switch_back * y[2] * abs(float(manager.denominator(t))),
                terminal=True,
                direction=-1,
            ),
            _event(lambda t, y: math.sin(2.0 * t), terminal=False),
        ]
        sol = solve_ivp(
            fun,
            (theta_start, theta_end),
            [s_start, x_start, z_start],
            method=self.options.method,
            rtol=self.options.rel_tol,
            atol=self.options.abs_tol,
            events=events,
        )
        branch.extend(sol.y[0], sol.y[1], sol.y[2], sol.t, Phase.Angle, skip_first=True)
        crossings = [
            (float(y[0]), float(y[1]), float(y[2]), float(t)) for t, y in zip(sol.t_events[4], sol.y_events[4])
        ]
        self._crossing_events(branch, direction, [c for c in crossings if abs(c[3] - theta_start) > EVENT_S_EPS])

        if sol.status == -1:
            self._finish(branch, direction, EventKind.StepFailure, sol.message)
        elif sol.t_events[0].size:
            self._finish(branch, direction, EventKind.SlopeBlowup)
        elif sol.t_events[1].size:
            self._finish(branch, direction, EventKind.BoundaryContact)
        elif sol.t_events[2].size:
            self._finish(branch, direction, EventKind.MaxArclength)

    def _assemble(self, branches: dict[Direction, _Branch]) -> schemes.Trace:
        backward, forward = branches[Direction.Backward], branches[Direction.Forward]
        s = np.array(backward.s[:0:-1] + forward.s)
        x = np.array(backward.x[:0:-1] + forward.x)
        z = np.array(backward.z[:0:-1] + forward.z)
        theta = np.array(backward.theta[:0:-1] + forward.theta)
        phase = np.array(backward.phase[:0:-1] + forward.phase, dtype=np.int8)
        theta_prime = np.asarray(self.manager.slope(z, theta), dtype=float)

        terminal: dict[Direction, schemes.IntegrationEvent] = {}
        for direction, branch in branches.items():
            if branch.terminal is None:
                continue
            terminal[direction] = branch.terminal
            index = 0 if direction is Direction.Backward else len(s) - 1
            before = index - direction.sign
            if branch.terminal.kind is EventKind.SlopeBlowup:
                theta_prime[index] = math.copysign(math.inf, float(self.manager.slope(z[before], theta[before])))
            elif branch.terminal.kind is EventKind.BoundaryContact and len(branch.s) > 1:
                contact = branch.terminal.payload if branch.terminal.payload is not None else theta[index]
                theta_prime[index] = self._contact_slope(theta_prime[before], z[before], z[index], contact)

        events = sorted(backward.events + forward.events + list(terminal.values()), key=lambda e: e.s)
        metadata = {
            "method": self.options.method,
            "switches": {d.value: b.switches for d, b in branches.items()},
            "truncated": any(b.truncated for b in branches.values()),
        }
        if any(e.kind is EventKind.MaxArclength for e in terminal.values()):
            metadata["window"] = "finite max-arclength window, not a maximal domain"
        return self._trace(s, x, z, theta, theta_prime, phase, events, terminal, metadata=metadata)

    def _trace(self, s, x, z, theta, theta_prime, phase, events, terminal, degenerate=False, metadata=None):
        for array in (s, x, z, theta, theta_prime, phase):
            array.setflags(write=False)
        return schemes.Trace(
            relation=self.relation,
            init=self.init,
            options=self.options,
            s=s,
            x=x,
            z=z,
            theta=theta,
            theta_prime=theta_prime,
            phase=phase,
            events=events,
            terminal=terminal,
            degenerate=degenerate,
            metadata=metadata or {},
        )

    def _straight_line(self) -> schemes.Trace:
        """theta' vanishing at one point vanishes everywhere, the profile is the line through the initial point."""
        theta0, z0 = self.init.theta0, self.init.z0
        cos0, sin0 = math.cos(theta0), math.sin(theta0)
        samples = settings.LINE_SAMPLES
        events = [self._make_event(EventKind.StraightLineDegenerate, None, 0.0, 0.0, z0, theta0)]
        terminal = {}
        pieces = {}
        for direction in Direction:
            length = self.options.max_arclength
            kind = EventKind.MaxArclength
            if direction.sign * sin0 < 0:
                to_boundary = (z0 - self.boundary_height) / abs(sin0)
                if to_boundary <= length:
                    length, kind = to_boundary, EventKind.BoundaryContact
            s = direction.sign * np.linspace(0.0, length, samples)
            pieces[direction] = s
            end = s[-1]
            terminal[direction] = self._make_event(
                kind,
                direction,
                end,
                end * cos0,
                z0 + end * sin0,
                theta0,
                payload=theta0 if kind is EventKind.BoundaryContact else None,
                terminal=True,
            )
        s = np.concatenate([pieces[Direction.Backward][:0:-1], pieces[Direction.Forward]])
        x = s * cos0
        z = z0 + s * sin0
        theta = np.full_like(s, theta0)
        return self._trace(
            s,
            x,
            z,
            theta,
            np.zeros_like(s),
            np.zeros(s.shape, dtype=np.int8),
            sorted(events + list(terminal.values()), key=lambda e: e.s),
            terminal,
            degenerate=True,
            metadata={"method": "analytic"},
        )

    def _initial_blowup(self) -> schemes.Trace:
        theta0, z0 = self.init.theta0, self.init.z0
        sign = math.copysign(1.0, float(self.manager.numerator(theta0)))
        terminal = {
            direction: self._make_event(EventKind.SlopeBlowup, direction, 0.0, 0.0, z0, theta0, theta0, terminal=True)
            for direction in Direction
        }
        return self._trace(
            np.zeros(1),
            np.zeros(1),
            np.full(1, z0),
            np.full(1, theta0),
            np.full(1, sign * math.inf),
            np.zeros(1, dtype=np.int8),
            list(terminal.values()),
            terminal,
            metadata={"method": self.options.method, "note": "theta' is unbounded at the initial point"},
        )


def integrate(
    relation: schemes.WeingartenRelation,
    init: schemes.InitialData,
    options: schemes.StepOptions | None = None,
) -> schemes.Trace:
    """
    Integrate the generating curve of the parabolic surface for a relation and initial data.
    Args:
        relation (schemes.WeingartenRelation): normalized relation.
        init (schemes.InitialData): initial height and tangent angle.
        options (schemes.StepOptions | None): tolerances and windows, settings defaults when None.
    Returns:
        schemes.Trace: joined trace, a straight line when the initial theta' vanishes.
    Raises:
        exceptions.StepFailureException: If the stepper fails without a recognized event.
    """
    trace = ProfileIntegrator(relation, init, options).run()
    logger.debug(
        "%s: %d states, s in [%.6g, %.6g], terminal %s",
        relation.label(),
        len(trace),
        *trace.s_extent,
        {d.value: e.kind.value for d, e in trace.terminal.items()},
    )
    return trace


class HermiteProfile:
    """
    Quintic Hermite reconstruction of x, z and theta through the stored states, using the stored theta'
    and the analytic theta''. States with unbounded theta' are left out. At a boundary contact state
    theta' is a limit and theta'' is not resolved, so x and z keep their first derivative there and
    theta keeps its first derivative only when the contact exponent is at least one.
    """

    def __init__(self, trace: schemes.Trace):
        keep = np.isfinite(trace.theta_prime)
        if np.count_nonzero(keep) < 2:
            raise exceptions.InsufficientDataException("at least two regular states are needed")
        contact = np.zeros(len(trace), dtype=bool)
        contact[trace.boundary_rows()] = True
        s, x, z, theta = trace.s[keep], trace.x[keep], trace.z[keep], trace.theta[keep]
        theta_p, contact = trace.theta_prime[keep], contact[keep]
        distinct = np.concatenate([[True], np.diff(s) > 0])
        s, x, z, theta, theta_p, contact = (
            s[distinct],
            x[distinct],
            z[distinct],
            theta[distinct],
            theta_p[distinct],
            contact[distinct],
        )
        if s.size < 2:
            raise exceptions.InsufficientDataException("at least two distinct regular states are needed")
        manager = get_manager(trace.relation)
        theta_pp = np.where(contact, 0.0, np.asarray(manager.theta_second(z, theta), dtype=float))
        smooth_end = np.array([flag and manager.contact_exponent(float(t)) >= 1.0 for flag, t in zip(contact, theta)])
        cos, sin = np.cos(theta), np.sin(theta)
        self.s_min, self.s_max = float(s[0]), float(s[-1])
        self._x = self._hermite(s, [x, cos, -sin * theta_p], np.where(contact, 2, 3))
        self._z = self._hermite(s, [z, sin, cos * theta_p], np.where(contact, 2, 3))
        self._theta = self._hermite(s, [theta, theta_p, theta_pp], np.where(contact, np.where(smooth_end, 2, 1), 3))

    @staticmethod
    def _hermite(s: np.ndarray, columns: list[np.ndarray], orders: np.ndarray) -> BPoly:
        """orders[i] is the number of leading columns matched at s[i]."""
        data = np.column_stack(columns)
        if np.all(orders == data.shape[1]):
            return BPoly.from_derivatives(s, data)
        return BPoly.from_derivatives(s, [row[:order] for row, order in zip(data, orders)])

    def __call__(self, s: np.ndarray | float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._x(s), self._z(s), self._theta(s)


def max_residual(trace: schemes.Trace) -> float:
    """
    Largest |residual| of the relation over stored states with z > 0, theta' recovered from the governing
    equation at each stored (z, theta). Blow-up states are skipped.
    """
    manager = get_manager(trace.relation)
    if trace.degenerate:
        slope = np.asarray(trace.theta_prime, dtype=float)
    else:
        slope = np.asarray(manager.slope(trace.z, trace.theta), dtype=float)
    worst = 0.0
    for i in range(len(trace)):
        if not math.isfinite(slope[i]) or not math.isfinite(trace.theta_prime[i]) or trace.z[i] <= 0:
            continue
        pair = curvatures_at(trace.state(i), float(slope[i]))
        worst = max(worst, abs(manager.residual(pair)))
    return worst


def _cumulative_gauss(profile: HermiteProfile, s: np.ndarray) -> np.ndarray:
    """Integral of sin(theta) cos(theta) from s[0] to every s, Gauss-Legendre on each step of the reconstruction."""
    lower, upper = s[:-1], s[1:]
    half, middle = (upper - lower) / 2.0, (upper + lower) / 2.0
    nodes = middle[:, None] + half[:, None] * GAUSS_NODES[None, :]
    _, _, theta = profile(nodes.ravel())
    values = (0.5 * np.sin(2.0 * theta)).reshape(nodes.shape)
    return np.concatenate([[0.0], np.cumsum(half * (values @ GAUSS_WEIGHTS))])


def first_integral_check(trace: schemes.Trace) -> float:
    """
    Deviation from the first integral of kappa1 = m kappa2 + n,
    n + cos(theta(s)) = (2 - m) / z(s) * int_0^s sin(theta) cos(theta) dt + z0 (n + cos(theta0)) / z(s),
    over states with z >= FIRST_INTEGRAL_MIN_HEIGHT * z0. The integral runs over the Hermite reconstruction,
    Gauss-Legendre between consecutive stored states.
    Raises:
        exceptions.ContractViolation: If the trace is not a principal-linear one.
    """
    relation = trace.relation
    if relation.kind is not schemes.RelationKind.PrincipalLinear:
        raise exceptions.ContractViolation("the first integral belongs to the principal-linear family")
    if trace.degenerate or len(trace) < 2:
        return 0.0
    m, n = relation.m, relation.n
    z0, theta0 = trace.init.z0, trace.init.theta0
    profile = HermiteProfile(trace)
    worst = 0.0
    for direction in Direction:
        index = trace.branch(direction)
        s, z, theta = trace.s[index], trace.z[index], trace.theta[index]
        if s.size < 2:
            continue
        integral = _cumulative_gauss(profile, s)
        right = ((2.0 - m) * integral + z0 * (n + math.cos(theta0))) / z  # type: ignore[operator]
        deviation = np.abs(n + np.cos(theta) - right)  # type: ignore[operator]
        valid = z >= FIRST_INTEGRAL_MIN_HEIGHT * z0
        if valid.any():
            worst = max(worst, float(deviation[valid].max()))
    logger.debug("first integral deviation %.3e over %d states", worst, len(trace))
    return worst


def integrate_segment(
    relation: schemes.WeingartenRelation,
    start: schemes.ProfileState,
    length: float,
    theta_stop: float | None = None,
    options: schemes.StepOptions | None = None,
) -> tuple[OdeSolution, float | None]:
    """
    Re-integrate x, z and theta over [start.s, start.s + length] with dense output, at the tighter of the
    given and the segment tolerances.
    Args:
        relation (schemes.WeingartenRelation): normalized relation.
        start (schemes.ProfileState): initial state of the segment.
        length (float): signed arc length to cover.
        theta_stop (float | None): angle whose first crossing is located.
        options (schemes.StepOptions | None): tolerances, settings defaults when None.
    Returns:
        tuple[OdeSolution, float | None]: the dense solution in s and the first s where theta reaches
            theta_stop, None when it does not.
    Raises:
        exceptions.StepFailureException: If the segment reaches the boundary or the stepper fails.
    """
    _require_positive_height(start)
    options = options or schemes.StepOptions()
    manager = get_manager(relation)
    boundary = options.boundary_eps * start.z

    def fun(s, y):
        slope = float(manager.numerator(y[2])) / (y[1] * float(manager.denominator(y[2])))
        return [math.cos(y[2]), math.sin(y[2]), slope]

    events = [_event(lambda s, y: y[1] - boundary, terminal=True, direction=-1)]
    if theta_stop is not None:
        events.append(_event(lambda s, y: y[2] - theta_stop, terminal=False))
    try:
        sol = solve_ivp(
            fun,
            (start.s, start.s + length),
            [start.x, start.z, start.theta],
            method=options.method,
            rtol=min(options.rel_tol, SEGMENT_REL_TOL),
            atol=min(options.abs_tol, SEGMENT_ABS_TOL),
            dense_output=True,
            events=events,
        )
    except (ZeroDivisionError, ValueError) as exc:
        raise exceptions.StepFailureException(f"segment from s={start.s!r} failed: {exc}")
    if sol.status != 0:
        raise exceptions.StepFailureException(f"segment from s={start.s!r} stopped early: {sol.message}")
    stop = float(sol.t_events[1][0]) if theta_stop is not None and sol.t_events[1].size else None
    return sol.sol, stop


def second_derivative_check(trace: schemes.Trace) -> float:
    """
    Largest deviation from the differentiated mean-Gauss equation
    (a / 2 + b cos(theta)) (z theta'' - sin(theta) theta') - b z sin(theta) theta'^2 = 0,
    with theta'' estimated by second order finite differences of the stored theta'.
    States with |theta'| > 10 or z < 1e-3 z0 are skipped.
    Raises:
        exceptions.ContractViolation: If the trace is not a mean-Gauss one.
        exceptions.InsufficientDataException: If fewer than five states are stored.
    """
    relation = trace.relation
    if relation.kind is not schemes.RelationKind.MeanGauss:
        raise exceptions.ContractViolation("the differentiated identity belongs to the mean-Gauss family")
    if trace.degenerate:
        return 0.0
    if len(trace) < 5:
        raise exceptions.InsufficientDataException(f"{len(trace)} states are too few for finite differences")
    a, b, _ = relation.raw_coefficients
    worst = 0.0
    for direction in Direction:
        index = trace.branch(direction)
        s, z, theta, theta_p = trace.s[index], trace.z[index], trace.theta[index], trace.theta_prime[index]
        regular = np.isfinite(theta_p)
        s, z, theta, theta_p = s[regular], z[regular], theta[regular], theta_p[regular]
        if s.size < 3:
            continue
        theta_pp = np.gradient(theta_p, s, edge_order=2)
        identity = (a / 2.0 + b * np.cos(theta)) * (z * theta_pp - np.sin(theta) * theta_p) - b * z * np.sin(
            theta
        ) * np.square(theta_p)
        valid = (np.abs(theta_p) <= 10.0) & (z >= 1e-3 * trace.init.z0)
        valid[[0, -1]] = False
        if valid.any():
            worst = max(worst, float(np.abs(identity[valid]).max()))
    return worst


def symmetry_defect(trace: schemes.Trace, s0: float = 0.0, samples: int = 401) -> float:
    """
    Largest distance between the trace and its reflection in the vertical line through the state at s0,
    compared on the common window through the Hermite reconstruction.
    """
    profile = HermiteProfile(trace)
    reach = min(s0 - profile.s_min, profile.s_max - s0)
    if reach <= 0:
        return 0.0
    t = np.linspace(0.0, reach, samples)
    x_plus, z_plus, _ = profile(s0 + t)
    x_minus, z_minus, _ = profile(s0 - t)
    x_center, _, _ = profile(s0)
    defect = np.maximum(np.abs(x_plus + x_minus - 2.0 * x_center), np.abs(z_plus - z_minus))
    return float(defect.max())
