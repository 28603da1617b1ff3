import hashlib
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from pydantic import ValidationError

from app.settings import settings
from app.weingarten import schemes
from app.weingarten.schemes import Direction, RelationKind, ShapeClass
from app.weingarten.services.classifier import classify
from app.weingarten.services.hyperbolic import mean_gauss_relation, normalize_relation
from app.weingarten.services.profile_ode import integrate
from app.weingarten.services.trace_analyzer import extract_features, reconcile
from app.weingarten.utils import exceptions, exports

__all__ = [
    "DIAGRAM_COLUMNS",
    "CellTask",
    "sweep_options",
    "relation_for",
    "run_cell",
    "run_sweep",
    "write_diagram",
    "spec_hash",
    "find_b0",
]

logger = logging.getLogger(__name__)

DIAGRAM_COLUMNS = (
    "i",
    "j",
    "first",
    "second",
    "shape_class",
    "theorem_ref",
    "on_boundary",
    "neighbour_classes",
    "reconciled",
    "contact_angle",
    "measured_angle",
    "period",
    "failure",
)


@dataclass(frozen=True)
class CellTask:
    i: int
    j: int
    kind: RelationKind
    params: dict[str, float]
    init: schemes.InitialData
    options: schemes.StepOptions
    integrate: bool
    neighbours: tuple[str, ...]
    trace_dir: Path | None


def sweep_options(spec: schemes.SweepSpec) -> schemes.StepOptions:
    if spec.options is not None:
        return spec.options
    return schemes.StepOptions(rel_tol=settings.SWEEP_REL_TOL, max_arclength=settings.SWEEP_MAX_ARCLENGTH)


def relation_for(kind: RelationKind, params: dict[str, float]) -> schemes.WeingartenRelation:
    """
    Normalized relation for sweep parameters, m and n for principal-linear, a, b and c for mean-Gauss.
    Raises:
        exceptions.TrivialRelationException: If the parameters fix one principal curvature.
        exceptions.InvalidRelationException: If no curvature is involved.
    """
    if kind is RelationKind.PrincipalLinear:
        return normalize_relation(1.0, -params["m"], params["n"], kind)
    return mean_gauss_relation(params["a"], params["b"], params.get("c", 0.0))


def _classify_params(kind: RelationKind, params: dict[str, float], theta0: float) -> schemes.ClassificationVerdict:
    """Verdict at the swept theta0 when theta0 is an axis, at the initial data theta0 otherwise."""
    try:
        relation = relation_for(kind, params)
    except exceptions.TrivialRelationException as exc:
        return exc.verdict
    return classify(relation, params.get("theta0", theta0))


def _neighbour_classes(task: CellTask, verdict: schemes.ClassificationVerdict) -> list[ShapeClass]:
    """Classes of the neighbours at +-NEIGHBOUR_EPS along each swept parameter."""
    classes: set[ShapeClass] = set()
    for name in task.neighbours:
        for step in (-settings.NEIGHBOUR_EPS, settings.NEIGHBOUR_EPS):
            params = {**task.params, name: task.params[name] + step}
            try:
                classes.add(_classify_params(task.kind, params, task.init.theta0).shape_class)
            except (exceptions.WeingartenException, ValidationError):
                continue
    classes.discard(verdict.shape_class)
    return sorted(classes, key=lambda shape: shape.value)


def run_cell(task: CellTask) -> schemes.SweepCell:
    """Classify one grid point, then trace and reconcile it unless the sweep is classification only."""
    base = {"i": task.i, "j": task.j, "params": task.params}
    try:
        verdict = _classify_params(task.kind, task.params, task.init.theta0)
    except (exceptions.WeingartenException, ValidationError) as exc:
        logger.warning("cell (%d, %d) %s failed to classify: %s", task.i, task.j, task.params, exc)
        return schemes.SweepCell(
            **base, shape_class=ShapeClass.Undetermined, theorem_ref="invalid", failure=f"{type(exc).__name__}: {exc}"
        )

    neighbour_classes = _neighbour_classes(task, verdict) if task.neighbours else []
    cell = {
        **base,
        "shape_class": verdict.shape_class,
        "theorem_ref": verdict.theorem_ref,
        "on_boundary": bool(neighbour_classes),
        "neighbour_classes": neighbour_classes,
        "contact_angle": verdict.contact_angle.root if verdict.contact_angle is not None else None,
    }
    if not task.integrate:
        return schemes.SweepCell(**cell)

    theta0 = task.params.get("theta0", task.init.theta0)
    init = task.init.model_copy(update={"theta0": theta0})
    try:
        relation = relation_for(task.kind, task.params)
        trace = integrate(relation, init, task.options)
        features = extract_features(trace)
        report = reconcile(features, verdict, init.z0)
        if task.trace_dir is not None:
            exports.write_profile_csv(trace, task.trace_dir / f"trace_{task.i}_{task.j}.csv")
    except exceptions.TrivialRelationException:
        return schemes.SweepCell(**cell)
    except (exceptions.WeingartenException, ValidationError) as exc:
        logger.warning("cell (%d, %d) %s failed: %s", task.i, task.j, task.params, exc)
        return schemes.SweepCell(**cell, failure=f"{type(exc).__name__}: {exc}")

    measured = next(
        (
            angles[Direction.Forward]
            for angles in (features.contact_angles, features.blowup_angles, features.end_angles)
            if Direction.Forward in angles
        ),
        None,
    )
    return schemes.SweepCell(
        **cell,
        reconciled=None if report.vacuous else report.passed,
        measured_angle=measured,
        period=features.period.length if features.period is not None else None,
    )


def _boundaries(spec: schemes.SweepSpec, cells: list[schemes.SweepCell]) -> list[schemes.BoundarySample]:
    first_axis, second_axis = spec.axes
    rows, cols = first_axis.count, second_axis.count
    samples = []
    for i in range(rows):
        for j in range(cols):
            here = cells[i * cols + j]
            for axis, (k, l) in ((first_axis, (i + 1, j)), (second_axis, (i, j + 1))):
                if k >= rows or l >= cols:
                    continue
                there = cells[k * cols + l]
                if here.shape_class is there.shape_class:
                    continue
                midpoint = {name: (here.params[name] + there.params[name]) / 2.0 for name in here.params}
                samples.append(
                    schemes.BoundarySample(
                        axis=axis.name,
                        first=(i, j),
                        second=(k, l),
                        classes=(here.shape_class, there.shape_class),
                        midpoint=midpoint,
                    )
                )
    return samples


def spec_hash(spec: schemes.SweepSpec) -> str:
    return hashlib.sha256(spec.model_dump_json().encode("utf-8")).hexdigest()


def _prepare_output(output: Path) -> Path:
    try:
        output.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise exceptions.SweepOutputException(f"can not create {output}: {exc}")
    if not os.access(output, os.W_OK):
        raise exceptions.SweepOutputException(f"{output} is not writable")
    return output


def write_diagram(diagram: schemes.PhaseDiagram, path: Path) -> Path:
    first, second = (axis.name for axis in diagram.spec.axes)
    rows = [
        {
            "i": cell.i,
            "j": cell.j,
            "first": cell.params[first],
            "second": cell.params[second],
            "shape_class": cell.shape_class.value,
            "theorem_ref": cell.theorem_ref,
            "on_boundary": cell.on_boundary,
            "neighbour_classes": "|".join(shape.value for shape in cell.neighbour_classes),
            "reconciled": "" if cell.reconciled is None else cell.reconciled,
            "contact_angle": "" if cell.contact_angle is None else cell.contact_angle,
            "measured_angle": "" if cell.measured_angle is None else cell.measured_angle,
            "period": "" if cell.period is None else cell.period,
            "failure": cell.failure or "",
        }
        for cell in diagram.cells
    ]
    return exports.write_csv(path, DIAGRAM_COLUMNS, rows)


def run_sweep(
    spec: schemes.SweepSpec, output: Path | None = None
) -> tuple[schemes.PhaseDiagram, schemes.SweepManifest]:
    """
    Trace, classify and reconcile every point of a two parameter grid.
    Cells are independent; they run in a process pool of spec.workers (default THREADS) workers
    and are collected in grid order, so the diagram does not depend on scheduling.
    Args:
        spec (schemes.SweepSpec): grid, fixed parameters, initial data and options.
        output (Path | None): directory for diagram.csv, manifest.json and optional per cell traces.
    Returns:
        tuple[schemes.PhaseDiagram, schemes.SweepManifest]: the diagram and its run manifest.
    Raises:
        exceptions.SweepOutputException: If the output directory can not be written.
    """
    if output is not None:
        _prepare_output(output)
    started = time.perf_counter()
    options = sweep_options(spec)
    first, second = spec.axes
    neighbours = tuple(axis.name for axis in spec.axes) if spec.neighbours else ()
    trace_dir = output if output is not None and spec.write_traces else None

    tasks = [
        CellTask(
            i=i,
            j=j,
            kind=spec.kind,
            params={**spec.fixed, first.name: float(u), second.name: float(v)},
            init=spec.init,
            options=options,
            integrate=spec.integrate,
            neighbours=neighbours,
            trace_dir=trace_dir,
        )
        for i, u in enumerate(first.values())
        for j, v in enumerate(second.values())
    ]
    workers = min(spec.workers or settings.THREADS, len(tasks))
    if workers <= 1:
        cells = [run_cell(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            cells = list(executor.map(run_cell, tasks, chunksize=max(1, len(tasks) // (4 * workers))))

    diagram = schemes.PhaseDiagram(spec=spec, cells=cells, boundaries=_boundaries(spec, cells))
    failures = sum(cell.failure is not None for cell in cells)
    manifest = schemes.SweepManifest(
        spec_hash=spec_hash(spec),
        created_at=datetime.now(timezone.utc).isoformat(),
        wall_time=time.perf_counter() - started,
        cells=len(cells),
        failures=failures,
        tolerances={
            "rel_tol": options.rel_tol,
            "abs_tol": options.abs_tol,
            "max_arclength": options.max_arclength,
            "contact_angle": settings.CONTACT_ANGLE_TOLERANCE,
            "asymptotic_angle": settings.ASYMPTOTIC_ANGLE_TOLERANCE,
            "neighbour_eps": settings.NEIGHBOUR_EPS,
        },
        output=output,
    )
    logger.info("sweep of %d cells done in %.2fs, %d failures", len(cells), manifest.wall_time, failures)
    if output is not None:
        write_diagram(diagram, output / "diagram.csv")
        exports.write_json(output / "manifest.json", manifest.model_dump(mode="json"))
    return diagram, manifest


def find_b0(
    a: float = 2.0,
    bracket: tuple[float, float] = (-0.99, -0.01),
    tol: float = 1e-4,
    init: schemes.InitialData | None = None,
    options: schemes.StepOptions | None = None,
) -> schemes.B0Result:
    """
    Bisect on b in a H + b K = 0 for the value separating self-intersecting profiles from embedded ones.
    Args:
        a (float): coefficient of H; the relation is normalized to a = 2.
        bracket (tuple[float, float]): lower and upper b, the predicate must differ at the two ends.
        tol (float): stop once the bracket is at most 2 * tol wide.
        init (schemes.InitialData | None): initial data, a horizontal start at z0 = 1 by default.
        options (schemes.StepOptions | None): integration options.
    Returns:
        schemes.B0Result: midpoint of the final bracket with the predicate at both ends.
    Raises:
        exceptions.NoSignChangeException: If both bracket ends give the same predicate.
    """
    init = init or schemes.InitialData()
    evaluations: list[tuple[float, bool]] = []
    summaries: dict[float, schemes.TraceFeatures] = {}

    def intersects(b: float) -> bool:
        trace = integrate(mean_gauss_relation(a, b, 0.0), init, options)
        summaries[b] = extract_features(trace)
        value = summaries[b].self_intersects
        evaluations.append((b, value))
        logger.debug("b = %.10f self-intersects: %s", b, value)
        return value

    lower, upper = bracket
    at_lower, at_upper = intersects(lower), intersects(upper)
    if at_lower == at_upper:
        raise exceptions.NoSignChangeException(
            f"self-intersection is {at_lower} at both b = {lower!r} and b = {upper!r}"
        )
    iterations = 0
    while upper - lower > 2.0 * tol:
        middle = (lower + upper) / 2.0
        if intersects(middle) == at_lower:
            lower = middle
        else:
            upper = middle
        iterations += 1

    result = schemes.B0Result(
        b0=(lower + upper) / 2.0,
        lower=lower,
        upper=upper,
        intersects_at_lower=at_lower,
        intersects_at_upper=at_upper,
        iterations=iterations,
        tolerance=tol,
        evaluations=evaluations,
        lower_features=summaries[lower],
        upper_features=summaries[upper],
    )
    logger.info("empirical b0 = %.8f in [%.8f, %.8f] after %d steps", result.b0, lower, upper, iterations)
    return result
