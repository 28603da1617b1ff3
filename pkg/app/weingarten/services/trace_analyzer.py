import logging
import math

import numpy as np

from app.settings import settings
from app.weingarten import schemes
from app.weingarten.schemes import (
    AngleRole,
    AsymptoticBoundary,
    CompleteEvidence,
    Convexity,
    Direction,
    EndBehavior,
    EventKind,
    ExtremumKind,
    Monotonicity,
    Phase,
    PredicateResult,
)
from app.weingarten.services.classifier import classify
from app.weingarten.services.profile_ode import HermiteProfile, integrate_segment
from app.weingarten.utils import exceptions
from app.weingarten.utils.geometry import drop_repeated_points, first_self_crossing
from app.weingarten.utils.managers import get_manager

__all__ = [
    "extract_features",
    "asymptotic_boundary",
    "reconcile",
    "verify_trace",
    "angle_distance",
]

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# spacing of the extra polyline vertices, in units of z0
POLYLINE_SPACING = 0.02
MAX_POLYLINE_POINTS = 400_000
PERIOD_SAMPLES = 1001
# re-integrated arc length, in units of the estimated period
PERIOD_SPAN = 2.25
PERIOD_DETECTION_TOLERANCE = 1e-3
HALF_TURN_TOLERANCE = 1e-6
SIGN_EPS = 1e-14
# contacts closer than this (in units of z0) are one tangency point seen from both branches
CONTACT_SEPARATION = 1e-3


def angle_distance(measured: float, root: float) -> float:
    """Distance from measured to the nearest of +-root modulo 2pi."""

    def wrapped(value: float) -> float:
        return abs(math.remainder(value, TWO_PI))

    return min(wrapped(measured - root), wrapped(measured + root))


def _profile(trace: schemes.Trace) -> HermiteProfile | None:
    if trace.degenerate:
        return None
    try:
        return HermiteProfile(trace)
    except exceptions.InsufficientDataException:
        return None


def _dense_polyline(trace: schemes.Trace, profile: HermiteProfile | None) -> tuple[np.ndarray, np.ndarray]:
    """
    Stored states plus Hermite samples inside long arc length steps.
    Returns:
        tuple[np.ndarray, np.ndarray]: arc length parameters and (n, 2) points (x, z).
    """
    s = np.asarray(trace.s, dtype=float)
    points = np.column_stack([trace.x, trace.z])
    if profile is None or s.size < 2:
        return s, points

    gaps = np.diff(s)
    finite = np.isfinite(trace.theta_prime)
    arc = trace.phase == Phase.ArcLength
    eligible = finite[:-1] & finite[1:] & arc[:-1] & arc[1:] & (gaps > 0)
    spacing = POLYLINE_SPACING * trace.init.z0
    counts = np.where(eligible, np.ceil(gaps / spacing) - 1, 0).astype(np.int64)
    total = int(counts.sum())
    if total > MAX_POLYLINE_POINTS:
        spacing *= total / MAX_POLYLINE_POINTS
        counts = np.where(eligible, np.ceil(gaps / spacing) - 1, 0).astype(np.int64)
        total = int(counts.sum())
    if total <= 0:
        return s, points

    segment = np.repeat(np.arange(gaps.size), counts)
    within = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    inserted = s[segment] + gaps[segment] * (within + 1) / (counts[segment] + 1)
    x_new, z_new, _ = profile(inserted)

    merged_s = np.concatenate([s, inserted])
    merged = np.concatenate([points, np.column_stack([x_new, z_new])])
    order = np.argsort(merged_s, kind="stable")
    return merged_s[order], merged[order]


def _window(s: np.ndarray, points: np.ndarray, lower: float, upper: float) -> tuple[np.ndarray, np.ndarray]:
    inside = (s >= lower) & (s <= upper)
    return s[inside], points[inside]


def _self_intersection(s: np.ndarray, points: np.ndarray) -> schemes.SelfIntersection | None:
    kept, index = drop_repeated_points(points)
    crossing = first_self_crossing(kept)
    if crossing is None:
        return None
    s_kept = s[index]

    def along(segment: int, fraction: float) -> float:
        return float(s_kept[segment] + fraction * (s_kept[segment + 1] - s_kept[segment]))

    return schemes.SelfIntersection(
        s_first=along(crossing.i, crossing.t),
        s_second=along(crossing.j, crossing.u),
        x=crossing.x,
        z=crossing.z,
    )


def _contact_tail(trace: schemes.Trace) -> np.ndarray:
    """
    Rows of a branch ending on L at heights below CONTACT_SEPARATION * z0, the terminal state included.
    There N(theta) is at rounding level, so theta' and cos(theta) have no reliable sign.
    """
    tail = np.zeros(len(trace), dtype=bool)
    low = trace.z <= CONTACT_SEPARATION * trace.init.z0
    for direction, event in trace.terminal.items():
        if event.kind is not EventKind.BoundaryContact:
            continue
        index = trace.branch(direction)
        tail[index[low[index]]] = True
    tail[trace.boundary_rows()] = True
    return tail


def _monotonicity(trace: schemes.Trace) -> Monotonicity:
    if trace.degenerate:
        return Monotonicity.Constant
    rows = ~np.isnan(trace.theta_prime) & ~_contact_tail(trace)
    slope = trace.theta_prime[rows]
    if slope.size and np.all(slope > 0):
        return Monotonicity.Increasing
    if slope.size and np.all(slope < 0):
        return Monotonicity.Decreasing
    if not np.any(slope):
        return Monotonicity.Constant
    return Monotonicity.Mixed


def _convexity(trace: schemes.Trace) -> Convexity:
    rows = np.isfinite(trace.theta_prime) & ~_contact_tail(trace)
    z_second = np.cos(trace.theta[rows]) * trace.theta_prime[rows]
    z_second = z_second[np.abs(z_second) > SIGN_EPS]
    if trace.degenerate or z_second.size == 0:
        return Convexity.Flat
    if np.all(z_second > 0):
        return Convexity.Convex
    if np.all(z_second < 0):
        return Convexity.Concave
    return Convexity.Mixed


def _is_contact_crossing(trace: schemes.Trace, event: schemes.IntegrationEvent) -> bool:
    """A crossing of the vertical met on the final approach to L is the contact angle itself, not a fold."""
    terminal = trace.terminal.get(event.direction) if event.direction is not None else None
    return (
        terminal is not None
        and terminal.kind is EventKind.BoundaryContact
        and event.z <= CONTACT_SEPARATION * trace.init.z0
    )


def _graph_over_l(trace: schemes.Trace, dense_x: np.ndarray) -> bool:
    """x' = cos(theta) keeps one sign, no vertical tangent is crossed and x is strictly monotone."""
    threshold = settings.GRAPH_COS_THRESHOLD
    for event in trace.events_of(EventKind.AngleCrossing):
        if int(round(event.payload or 0)) % 2 and not _is_contact_crossing(trace, event):
            return False
    if len(trace) > 2:
        interior = np.zeros(len(trace), dtype=bool)
        interior[1:-1] = True
        cos = np.cos(trace.theta[interior & ~_contact_tail(trace)])
    else:
        cos = np.cos(np.asarray([trace.init.theta0]))
    if not (np.all(cos > threshold) or np.all(cos < -threshold)):
        return False
    steps = np.diff(dense_x)
    steps = steps[steps != 0]
    return bool(np.all(steps > 0) or np.all(steps < 0))


def _extrema(trace: schemes.Trace) -> list[schemes.Extremum]:
    """Heights where sin(theta) vanishes, the kind taken from the sign of z'' = cos(theta) theta'."""
    if trace.degenerate:
        return []
    manager = get_manager(trace.relation)
    candidates = [
        (e.s, e.x, e.z, e.theta)
        for e in trace.events_of(EventKind.AngleCrossing)
        if int(round(e.payload or 0)) % 2 == 0
    ]
    init = trace.init
    if abs(math.sin(init.theta0)) <= 1e-12 and math.isfinite(float(manager.slope(init.z0, init.theta0))):
        candidates.append((0.0, init.x0, init.z0, init.theta0))

    extrema = []
    for s, x, z, theta in sorted(candidates):
        z_second = math.cos(theta) * float(manager.slope(z, theta))
        if abs(z_second) <= SIGN_EPS or not math.isfinite(z_second):
            continue
        kind = ExtremumKind.Minimum if z_second > 0 else ExtremumKind.Maximum
        extrema.append(schemes.Extremum(s=s, x=x, z=z, kind=kind))
    return extrema


def _closed_period(
    trace: schemes.Trace, extremum: schemes.Extremum, theta: float, guess: float
) -> schemes.Period | None:
    """
    Re-integrate from a symmetry point over a little more than two periods and compare the second period
    with the first. The angle is snapped to its multiple of pi, the period ends where theta has turned 2pi.
    """
    theta_start = math.pi * round(theta / math.pi)
    turning = math.copysign(1.0, float(get_manager(trace.relation).slope(extremum.z, theta_start)))
    start = schemes.ProfileState(s=extremum.s, x=extremum.x, z=extremum.z, theta=theta_start)
    span = PERIOD_SPAN * guess
    try:
        dense, stop = integrate_segment(trace.relation, start, span, theta_start + turning * TWO_PI, trace.options)
    except exceptions.StepFailureException as exc:
        logger.debug("period check from s=%.6g abandoned: %s", extremum.s, exc)
        return None
    if stop is None or 2.0 * (stop - extremum.s) > span:
        return None
    length = stop - extremum.s
    s = np.linspace(extremum.s, stop, PERIOD_SAMPLES)
    first, second = dense(s), dense(s + length)
    z_defect = float(np.abs(second[1] - first[1]).max())
    theta_defect = float(np.abs(np.abs(second[2] - first[2]) - TWO_PI).max())
    z0 = trace.init.z0
    if z_defect > PERIOD_DETECTION_TOLERANCE * z0 or theta_defect > PERIOD_DETECTION_TOLERANCE:
        return None
    return schemes.Period(
        length=length,
        translation=float(np.median(second[0] - first[0])),
        max_z_defect=z_defect,
        max_theta_defect=theta_defect,
    )


def _period(
    trace: schemes.Trace, profile: HermiteProfile | None, extrema: list[schemes.Extremum]
) -> tuple[schemes.Period | None, float | None]:
    """
    Twice the arc length between consecutive symmetry points half a turn apart, confirmed by
    re-integrating two periods from the first of them.
    Returns:
        tuple[schemes.Period | None, float | None]: the period and the start of a two period window
            inside the trace.
    """
    if profile is None or len(extrema) < 2:
        return None, None
    pairs = sorted(zip(extrema[:-1], extrema[1:]), key=lambda pair: abs(pair[0].s + pair[1].s))
    for first, second in pairs:
        _, _, (theta_a, theta_b) = profile(np.array([first.s, second.s]))
        if abs(abs(theta_b - theta_a) - math.pi) > HALF_TURN_TOLERANCE:
            continue
        guess = 2.0 * (second.s - first.s)
        start = max(profile.s_min, first.s - guess / 2.0)
        if start + 2.0 * guess > profile.s_max:
            start = profile.s_max - 2.0 * guess
        if start < profile.s_min:
            continue
        period = _closed_period(trace, first, float(theta_a), guess)
        if period is not None:
            return period, start
    return None, None


def _end_behavior(trace: schemes.Trace, direction: Direction, periodic: bool) -> EndBehavior:
    event = trace.terminal.get(direction)
    kind = event.kind if event is not None else None
    if kind is EventKind.BoundaryContact:
        return EndBehavior.Contact
    if kind is EventKind.SlopeBlowup:
        return EndBehavior.Blowup
    if kind is not EventKind.MaxArclength:
        return EndBehavior.Undetermined
    z0 = trace.init.z0
    if periodic:
        return EndBehavior.Periodic
    if event.z <= settings.DECAY_FACTOR * z0:
        return EndBehavior.Decay
    if event.z >= settings.ESCAPE_FACTOR * z0 or abs(event.x) >= settings.ESCAPE_FACTOR * z0:
        return EndBehavior.Escape
    return EndBehavior.Undetermined


def _complete_evidence(ends: dict[Direction, EndBehavior]) -> CompleteEvidence:
    behaviors = set(ends.values())
    if EndBehavior.Blowup in behaviors:
        return CompleteEvidence.BlowupDetected
    if behaviors == {EndBehavior.Contact}:
        return CompleteEvidence.BoundaryContactBothEnds
    if EndBehavior.Periodic in behaviors:
        return CompleteEvidence.PeriodicExtension
    return CompleteEvidence.WindowExhausted


def asymptotic_boundary(features: schemes.TraceFeatures, z0: float = 1.0) -> tuple[AsymptoticBoundary, bool]:
    """
    Empirical boundary at infinity from the two ends of a trace.
    Args:
        features (schemes.TraceFeatures): features with ends and end positions filled.
        z0 (float): initial height, the length unit.
    Returns:
        tuple[AsymptoticBoundary, bool]: the label and whether it was inferred from a finite window.
    """
    ends = set(features.ends.values())
    if not ends or ends & {EndBehavior.Blowup, EndBehavior.Undetermined}:
        return AsymptoticBoundary.Undetermined, False
    if EndBehavior.Periodic in ends:
        return AsymptoticBoundary.PointInfinity, False
    if ends == {EndBehavior.Contact}:
        separation = abs(features.end_x[Direction.Forward] - features.end_x[Direction.Backward])
        if separation > CONTACT_SEPARATION * z0:
            return AsymptoticBoundary.TwoTangentCircles, False
        return AsymptoticBoundary.OneCircle, False
    if ends == {EndBehavior.Escape}:
        return AsymptoticBoundary.PointInfinity, True
    if EndBehavior.Escape in ends and EndBehavior.Decay in ends:
        return AsymptoticBoundary.Undetermined, False
    return AsymptoticBoundary.OneCircle, True


def extract_features(trace: schemes.Trace) -> schemes.TraceFeatures:
    """
    Measure the geometric features of a trace.
    Args:
        trace (schemes.Trace): integrated profile.
    Returns:
        schemes.TraceFeatures: monotonicity, crossings, graph and convexity flags, extrema, period,
            end behaviour and the empirical boundary at infinity.
    """
    z0 = trace.init.z0
    profile = _profile(trace)
    dense_s, dense = _dense_polyline(trace, profile)
    extrema = _extrema(trace)
    period, start = _period(trace, profile, extrema)

    search_s, search = dense_s, dense
    if period is not None and start is not None:
        if abs(period.translation) <= CONTACT_SEPARATION * z0:
            # a closed curve retraces itself after one period
            search_s, search = _window(dense_s, dense, start, start + period.length * (1.0 - 1e-3))
        else:
            search_s, search = _window(dense_s, dense, start, start + 2.0 * period.length)
    crossing = _self_intersection(search_s, search)

    graph = crossing is None and _graph_over_l(trace, dense[:, 0])

    ends: dict[Direction, EndBehavior] = {}
    end_angles, end_x, end_z = {}, {}, {}
    contact_angles, blowup_angles = {}, {}
    for direction in Direction:
        last = int(trace.branch(direction)[-1])
        end_angles[direction] = float(trace.theta[last])
        end_x[direction] = float(trace.x[last])
        end_z[direction] = float(trace.z[last])
        ends[direction] = _end_behavior(trace, direction, period is not None)
        event = trace.terminal.get(direction)
        if event is not None and event.payload is not None:
            if event.kind is EventKind.BoundaryContact:
                contact_angles[direction] = float(event.payload)
            elif event.kind is EventKind.SlopeBlowup:
                blowup_angles[direction] = float(event.payload)

    features = schemes.TraceFeatures(
        theta_monotone=_monotonicity(trace),
        self_intersection=crossing,
        graph_over_l=graph,
        convexity=_convexity(trace),
        extrema=extrema,
        period=period,
        contact_angles=contact_angles,
        blowup_angles=blowup_angles,
        end_angles=end_angles,
        ends=ends,
        end_x=end_x,
        end_z=end_z,
        complete_evidence=_complete_evidence(ends),
    )
    label, inferred = asymptotic_boundary(features, z0)
    return features.model_copy(update={"asymptotic_boundary": label, "asymptotic_inferred": inferred})


def _equal(name: str, predicted, measured) -> PredicateResult:
    return PredicateResult(name=name, predicted=predicted, measured=measured, passed=predicted == measured)


def _angle_predicates(
    features: schemes.TraceFeatures, contact: schemes.ContactAngle, z0: float
) -> list[PredicateResult]:
    root = contact.root
    if root is None:
        return [PredicateResult(name="contact_angle", predicted=None, measured=None, passed=False)]
    results = []
    for direction in Direction:
        name = f"{contact.role.value}_angle[{direction.value}]"
        if contact.role is AngleRole.Contact:
            measured = features.contact_angles.get(direction)
            tolerance = settings.CONTACT_ANGLE_TOLERANCE
        elif contact.role is AngleRole.Blowup:
            measured = features.blowup_angles.get(direction)
            tolerance = settings.CONTACT_ANGLE_TOLERANCE
        else:
            tolerance = settings.ASYMPTOTIC_ANGLE_TOLERANCE
            measured = features.end_angles.get(direction)
            if features.ends.get(direction) is not EndBehavior.Escape:
                measured = None
            elif features.end_z[direction] < z0 / tolerance:
                # the window ends before the tangent settles; nothing to compare
                results.append(PredicateResult(name=name, predicted=root, measured=measured, passed=True))
                continue
        if measured is None:
            results.append(PredicateResult(name=name, predicted=root, measured=None, passed=False))
            continue
        deviation = angle_distance(measured, root)
        results.append(
            PredicateResult(
                name=name, predicted=root, measured=measured, passed=deviation <= tolerance, deviation=deviation
            )
        )
    return results


def reconcile(
    features: schemes.TraceFeatures, verdict: schemes.ClassificationVerdict, z0: float = 1.0
) -> schemes.ReconciliationReport:
    """
    Check each property a verdict asserts against the measured features.
    Args:
        features (schemes.TraceFeatures): measured features.
        verdict (schemes.ClassificationVerdict): closed form prediction.
        z0 (float): initial height of the trace.
    Returns:
        schemes.ReconciliationReport: every predicate checked; vacuous for Undetermined and trivial verdicts.
    """
    if verdict.vacuous:
        return schemes.ReconciliationReport(passed=True, vacuous=True, verdict=verdict, features=features)

    predicates: list[PredicateResult] = []
    if verdict.graph_over_l is not None:
        predicates.append(_equal("graph_over_l", verdict.graph_over_l, features.graph_over_l))
    if verdict.self_intersects is not None:
        predicates.append(_equal("self_intersects", verdict.self_intersects, features.self_intersects))
    if verdict.convexity is not None:
        predicates.append(_equal("convexity", verdict.convexity, features.convexity))
    if verdict.minima is not None:
        predicates.append(_equal("minima", verdict.minima, len(features.minima)))
    if verdict.maxima is not None:
        predicates.append(_equal("maxima", verdict.maxima, len(features.maxima)))

    if verdict.complete is True:
        passed = all(
            end in (EndBehavior.Contact, EndBehavior.Escape, EndBehavior.Decay, EndBehavior.Periodic)
            for end in features.ends.values()
        )
        predicates.append(
            PredicateResult(name="complete", predicted=True, measured=features.complete_evidence, passed=passed)
        )
    elif verdict.complete is False:
        predicates.append(
            PredicateResult(
                name="complete",
                predicted=False,
                measured=features.complete_evidence,
                passed=features.complete_evidence is CompleteEvidence.BlowupDetected,
            )
        )

    period = features.period
    if verdict.periodic:
        passed = (
            period is not None
            and period.max_z_defect <= settings.PERIOD_Z_TOLERANCE * z0
            and period.max_theta_defect <= settings.PERIOD_THETA_TOLERANCE
        )
        deviation = period.max_z_defect if period is not None else None
        predicates.append(
            PredicateResult(name="periodic", predicted=True, measured=period, passed=passed, deviation=deviation)
        )
    else:
        predicates.append(PredicateResult(name="periodic", predicted=False, measured=period, passed=period is None))

    if verdict.contact_angle is not None:
        predicates.extend(_angle_predicates(features, verdict.contact_angle, z0))

    if verdict.asymptotic_boundary is not AsymptoticBoundary.Undetermined:
        predicates.append(
            _equal("asymptotic_boundary", verdict.asymptotic_boundary, features.asymptotic_boundary)
        )

    report = schemes.ReconciliationReport(
        passed=all(p.passed for p in predicates),
        predicates=predicates,
        verdict=verdict,
        features=features,
    )
    if not report.passed:
        logger.info(
            "%s does not reconcile: %s", verdict.shape_class.value, ", ".join(p.name for p in report.failures)
        )
    return report


def verify_trace(trace: schemes.Trace) -> schemes.ReconciliationReport:
    """Classify the relation of a trace and reconcile the verdict with its measured features."""
    verdict = classify(trace.relation, trace.init.theta0)
    return reconcile(extract_features(trace), verdict, trace.init.z0)
