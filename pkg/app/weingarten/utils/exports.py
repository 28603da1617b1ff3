import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from app.weingarten import schemes
from app.weingarten.services.hyperbolic import curvatures_at

__all__ = [
    "PROFILE_COLUMNS",
    "profile_rows",
    "write_csv",
    "write_profile_csv",
    "write_json",
    "write_obj",
    "render_svg",
    "write_svg",
]

PROFILE_COLUMNS = ("s", "x", "z", "theta", "kappa1", "kappa2", "H", "K")

SVG_WIDTH = 640
SVG_HEIGHT = 480
SVG_MARGIN = 24
SVG_COLORS = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98")


def profile_rows(trace: schemes.Trace) -> list[dict[str, float]]:
    rows = []
    for i, state in enumerate(trace.states()):
        theta_prime = float(trace.theta_prime[i])
        if math.isfinite(theta_prime) and state.z > 0:
            pair = curvatures_at(state, theta_prime)
            curvatures = (pair.kappa1, pair.kappa2, pair.h, pair.k)
        else:
            curvatures = (math.copysign(math.inf, theta_prime), math.cos(state.theta), math.nan, math.nan)
        rows.append(dict(zip(PROFILE_COLUMNS, (state.s, state.x, state.z, state.theta, *curvatures))))
    return rows


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def write_profile_csv(trace: schemes.Trace, path: Path) -> Path:
    """Profile polyline with curvatures, one row per stored state, floats at round-trip precision."""
    return write_csv(path, PROFILE_COLUMNS, profile_rows(trace))


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def write_obj(mesh: schemes.ParabolicMesh, path: Path, provenance: dict[str, Any] | None = None) -> Path:
    """
    ASCII OBJ with a comment header. Each quad is split along its shorter diagonal.
    Args:
        mesh (schemes.ParabolicMesh): swept surface.
        path (Path): output file.
        provenance (dict[str, Any] | None): extra header entries.
    Returns:
        Path: the written file.
    """
    rows, cols = mesh.shape
    vertices = mesh.vertices.reshape(-1, 3)
    lines = [f"# parabolic linear Weingarten surface, {mesh.relation.label()}", f"# grid {rows} x {cols}"]
    lines += [f"# {key}: {value}" for key, value in sorted((provenance or {}).items())]
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in vertices.tolist()]

    for i in range(rows - 1):
        for j in range(cols - 1):
            a, b = i * cols + j, (i + 1) * cols + j
            c, d = b + 1, a + 1
            main = np.linalg.norm(vertices[a] - vertices[c])
            anti = np.linalg.norm(vertices[b] - vertices[d])
            if main <= anti:
                faces = ((a, b, c), (a, c, d))
            else:
                faces = ((a, b, d), (b, c, d))
            lines += [f"f {p + 1} {q + 1} {r + 1}" for p, q, r in faces]

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def _fmt(value: float) -> str:
    text = f"{round(value, 6):.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def render_svg(curves: Sequence[tuple[np.ndarray, np.ndarray]], title: str = "") -> str:
    """
    Planar (x, z) curves in a fixed viewport with the boundary line z = 0 and the axis x = 0.
    Coordinates are rounded to 1e-6 so the output is stable.
    """
    finite = [(np.asarray(x)[np.isfinite(x)], np.asarray(z)[np.isfinite(z)]) for x, z in curves]
    xs = np.concatenate([x for x, _ in finite] + [np.zeros(1)])
    zs = np.concatenate([z for _, z in finite] + [np.zeros(1)])
    x_min, x_max = float(xs.min()), float(xs.max())
    z_min, z_max = float(zs.min()), float(zs.max())
    scale = min(
        (SVG_WIDTH - 2 * SVG_MARGIN) / max(x_max - x_min, 1e-12),
        (SVG_HEIGHT - 2 * SVG_MARGIN) / max(z_max - z_min, 1e-12),
    )

    def px(x: float) -> str:
        return _fmt(SVG_MARGIN + (x - x_min) * scale)

    def pz(z: float) -> str:
        return _fmt(SVG_HEIGHT - SVG_MARGIN - (z - z_min) * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f"<title>{title}</title>",
        f'<line x1="{px(x_min)}" y1="{pz(0.0)}" x2="{px(x_max)}" y2="{pz(0.0)}" stroke="#888" stroke-width="1"/>',
        f'<line x1="{px(0.0)}" y1="{pz(z_min)}" x2="{px(0.0)}" y2="{pz(z_max)}" stroke="#ccc" stroke-width="1"/>',
    ]
    for index, (x, z) in enumerate(curves):
        points = " ".join(f"{px(a)},{pz(b)}" for a, b in zip(x, z) if math.isfinite(a) and math.isfinite(b))
        color = SVG_COLORS[index % len(SVG_COLORS)]
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: Path, traces: Sequence[schemes.Trace], title: str = "") -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg([(t.x, t.z) for t in traces], title), encoding="utf-8")
    return path
