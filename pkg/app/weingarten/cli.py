import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from pydantic import ValidationError

from app.settings import settings
from app.weingarten import schemes, services
from app.weingarten.utils import exceptions, exports

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STEP_FAILURE = 3
EXIT_VERIFICATION = 4


class UsageError(Exception):
    pass


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _relation_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    family = parent.add_mutually_exclusive_group(required=True)
    family.add_argument("--principal", action="store_true", help="kappa1 = m kappa2 + n")
    family.add_argument("--meangauss", action="store_true", help="a H + b K = c")
    parent.add_argument("-m", type=float, help="slope m of the principal-linear relation")
    parent.add_argument("-n", type=float, help="offset n of the principal-linear relation")
    parent.add_argument("-a", type=float, help="coefficient of H")
    parent.add_argument("-b", type=float, help="coefficient of K")
    parent.add_argument("-c", type=float, default=0.0, help="right hand side of the mean-Gauss relation")
    parent.add_argument("--z0", type=float, default=1.0, help="initial height")
    parent.add_argument("--theta0", type=float, default=0.0, help="initial tangent angle in radians")
    return parent


def _options_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--rel-tol", type=float, help=f"relative tolerance (default {settings.REL_TOL})")
    parent.add_argument("--abs-tol", type=float, help=f"absolute tolerance (default {settings.ABS_TOL})")
    parent.add_argument("--max-arclength", type=float, help=f"arc length window (default {settings.MAX_ARCLENGTH})")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weingarten",
        description="Generating curves of parabolic linear Weingarten surfaces in hyperbolic space.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    relation, options = _relation_parent(), _options_parent()

    trace = commands.add_parser("trace", parents=[relation, options], help="integrate a profile curve")
    trace.add_argument("--csv", type=Path, help="write the profile with curvatures")
    trace.add_argument("--svg", type=Path, help="draw the (x, z) curve")

    commands.add_parser("classify", parents=[relation], help="closed form verdict, no integration")

    verify = commands.add_parser("verify", parents=[relation, options], help="trace, classify and reconcile")
    verify.add_argument("--csv", type=Path, help="write the profile with curvatures")

    mesh = commands.add_parser("mesh", parents=[relation, options], help="sweep the profile into an OBJ surface")
    mesh.add_argument("--obj", type=Path, required=True, help="output OBJ file")
    mesh.add_argument("--t-min", type=float, default=-1.0, help="start of the sweep direction")
    mesh.add_argument("--t-max", type=float, default=1.0, help="end of the sweep direction")
    mesh.add_argument("--t-count", type=int, default=2, help="samples along the sweep direction")
    mesh.add_argument("--s-stride", type=int, default=1, help="with --stored-rows, keep every n-th profile state")
    mesh.add_argument("--s-spacing", type=float, help="arc length spacing of the resampled rows")
    mesh.add_argument("--stored-rows", action="store_true", help="sweep the stored states instead of resampling")

    sweep = commands.add_parser("sweep", help="phase diagram from a JSON sweep spec")
    sweep.add_argument("spec", type=Path, help="JSON file with a sweep spec")
    sweep.add_argument("--out", type=Path, default=Path("sweep"), help="output directory")

    figures = commands.add_parser("figures", parents=[options], help="regenerate the published generating curves")
    figures.add_argument("--out", type=Path, default=Path("gallery"), help="output directory")

    b0 = commands.add_parser("b0", parents=[options], help="bisect the embeddedness threshold of 2H + bK = 0")
    b0.add_argument("--lower", type=float, default=-0.99, help="lower end of the bracket on b")
    b0.add_argument("--upper", type=float, default=-0.01, help="upper end of the bracket on b")
    b0.add_argument("--tol", type=float, default=1e-4, help="half width of the final bracket")
    b0.add_argument("--out", type=Path, help="directory for b0.json and the traces at b0 -+ tol")
    return parser


def _request(args: argparse.Namespace) -> schemes.VerifyRequest:
    if args.principal:
        if args.m is None or args.n is None:
            raise UsageError("--principal needs -m and -n")
        kind, a, b, c = schemes.RelationKind.PrincipalLinear, 1.0, -args.m, args.n
    else:
        if args.a is None or args.b is None:
            raise UsageError("--meangauss needs -a and -b")
        kind, a, b, c = schemes.RelationKind.MeanGauss, args.a, args.b, args.c
    return schemes.VerifyRequest(kind=kind, a=a, b=b, c=c, z0=args.z0, theta0=args.theta0)


def _options(args: argparse.Namespace) -> schemes.StepOptions | None:
    given = {
        "rel_tol": getattr(args, "rel_tol", None),
        "abs_tol": getattr(args, "abs_tol", None),
        "max_arclength": getattr(args, "max_arclength", None),
    }
    given = {key: value for key, value in given.items() if value is not None}
    return schemes.StepOptions(**given) if given else None


def _trace_payload(trace: schemes.Trace) -> dict[str, Any]:
    return {
        "relation": trace.relation.label(),
        "degenerate": trace.degenerate,
        "states": len(trace),
        "s_extent": trace.s_extent,
        "terminal": {d.value: e.model_dump(mode="json") for d, e in trace.terminal.items()},
        "contact_angles": {
            d.value: e.payload for d, e in trace.terminal.items() if e.kind is schemes.EventKind.BoundaryContact
        },
        "blowup_angles": {
            d.value: e.payload for d, e in trace.terminal.items() if e.kind is schemes.EventKind.SlopeBlowup
        },
        "metadata": trace.metadata,
    }


def cmd_trace(args: argparse.Namespace) -> int:
    service = services.WeingartenService()
    request = _request(args)
    try:
        trace = service.trace(request, _options(args))
    except exceptions.TrivialRelationException as exc:
        _emit({"verdict": exc.verdict.to_json(), "note": "trivial relation, nothing to integrate"})
        return EXIT_OK
    if args.csv:
        exports.write_profile_csv(trace, args.csv)
    if args.svg:
        exports.write_svg(args.svg, [trace], title=trace.relation.label())
    _emit(_trace_payload(trace))
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    _emit(services.WeingartenService().classify(_request(args)).to_json())
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    service = services.WeingartenService()
    request = _request(args)
    trace, report = service.verify(request, _options(args))
    if trace is None or report is None:
        _emit({"verdict": service.classify(request).to_json(), "passed": True, "vacuous": True})
        return EXIT_OK
    if args.csv:
        exports.write_profile_csv(trace, args.csv)
    features = report.features
    _emit(
        {
            "verdict": report.verdict.to_json(),
            "passed": report.passed,
            "vacuous": report.vacuous,
            "predicates": [p.model_dump(mode="json") for p in report.predicates],
            "measured": {
                "contact_angles": {d.value: v for d, v in features.contact_angles.items()},
                "blowup_angles": {d.value: v for d, v in features.blowup_angles.items()},
                "asymptotic_boundary": features.asymptotic_boundary.value,
                "self_intersects": features.self_intersects,
                "period": features.period.model_dump() if features.period is not None else None,
            },
        }
    )
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def cmd_mesh(args: argparse.Namespace) -> int:
    service = services.WeingartenService()
    trace = service.trace(_request(args), _options(args))
    mesh = services.build_mesh(
        trace,
        t_range=(args.t_min, args.t_max),
        t_count=args.t_count,
        s_stride=args.s_stride,
        s_spacing=args.s_spacing,
        stored_rows=args.stored_rows,
    )
    exports.write_obj(mesh, args.obj, provenance={"z0": args.z0, "theta0": args.theta0, "states": len(trace)})
    payload: dict[str, Any] = {"obj": str(args.obj), "rows": mesh.shape[0], "clamped_rows": mesh.clamped_rows}
    if mesh.shape[0] >= 3:
        payload["audit"] = services.discrete_curvature_audit(mesh).model_dump()
    _emit(payload)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        spec = schemes.SweepSpec.model_validate_json(args.spec.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"can not read {args.spec}: {exc}")
    _, manifest = services.run_sweep(spec, args.out)
    _emit(manifest.model_dump(mode="json"))
    return EXIT_OK


def cmd_figures(args: argparse.Namespace) -> int:
    written = services.render_gallery(args.out, _options(args))
    _emit([str(path) for path in written])
    return EXIT_OK


def cmd_b0(args: argparse.Namespace) -> int:
    options = _options(args)
    result = services.find_b0(bracket=(args.lower, args.upper), tol=args.tol, options=options)
    if args.out:
        exports.write_json(args.out / "b0.json", result.model_dump(mode="json"))
        for name, b in (("lower", result.lower), ("upper", result.upper)):
            relation = services.mean_gauss_relation(2.0, b, 0.0)
            trace = services.integrate(relation, schemes.InitialData(), options)
            exports.write_profile_csv(trace, args.out / f"trace_{name}.csv")
    _emit(result.model_dump(mode="json"))
    return EXIT_OK


COMMANDS = {
    "trace": cmd_trace,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "mesh": cmd_mesh,
    "sweep": cmd_sweep,
    "figures": cmd_figures,
    "b0": cmd_b0,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(asctime)s - %(levelname)s - %(name)s - %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except exceptions.StepFailureException as exc:
        logger.error("integration failed: %s", exc)
        return EXIT_STEP_FAILURE
    except (
        ValidationError,
        exceptions.InvalidRelationException,
        exceptions.TrivialRelationException,
        exceptions.NoSignChangeException,
        exceptions.SweepOutputException,
        exceptions.InsufficientDataException,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
