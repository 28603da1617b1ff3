import collections
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SegmentCrossing",
    "first_self_crossing",
    "first_self_crossing_brute_force",
    "drop_repeated_points",
]

# crossings of nearly parallel segments are retraced arcs, not transversal intersections
MIN_CROSSING_SINE = 1e-6


@dataclass(frozen=True)
class SegmentCrossing:
    """Proper crossing of segments i and j (i < j - 1) at fractions t and u along them."""

    i: int
    j: int
    t: float
    u: float
    x: float
    z: float


def drop_repeated_points(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Remove consecutive duplicates.
    Returns:
        tuple[np.ndarray, np.ndarray]: kept points and their indices in the input.
    """
    if len(points) == 0:
        return points, np.arange(0)
    keep = np.concatenate([[True], np.any(np.diff(points, axis=0) != 0, axis=1)])
    return points[keep], np.flatnonzero(keep)


def _cross(ax: float, az: float, bx: float, bz: float) -> float:
    return ax * bz - az * bx


def _proper_crossing(points: np.ndarray, i: int, j: int) -> SegmentCrossing | None:
    """Cramer's rule on p_i + t a = p_j + u b, strict interiors only."""
    px, pz = points[i]
    ax, az = points[i + 1] - points[i]
    qx, qz = points[j]
    bx, bz = points[j + 1] - points[j]
    denominator = _cross(ax, az, bx, bz)
    if abs(denominator) <= MIN_CROSSING_SINE * math.hypot(ax, az) * math.hypot(bx, bz):
        return None
    cx, cz = qx - px, qz - pz
    t = _cross(cx, cz, bx, bz) / denominator
    u = _cross(cx, cz, ax, az) / denominator
    if 0.0 < t < 1.0 and 0.0 < u < 1.0:
        return SegmentCrossing(i=i, j=j, t=t, u=u, x=px + t * ax, z=pz + t * az)
    return None


def first_self_crossing(points: np.ndarray) -> SegmentCrossing | None:
    """
    First proper self-crossing of a polyline, in (i, j) order, found through a uniform grid of
    cells sized by the median segment length. Adjacent segments are never compared.
    Args:
        points (np.ndarray): (n, 2) vertices without consecutive duplicates.
    Returns:
        SegmentCrossing | None: the crossing with the smallest (i, j), None for a simple polyline.
    """
    if len(points) < 4:
        return None
    lengths = np.hypot(*np.diff(points, axis=0).T)
    # long escape steps would otherwise cover quadratically many cells
    cell = max(float(np.median(lengths)), float(lengths.max()) / 64.0) or 1.0
    lower = np.floor(np.minimum(points[:-1], points[1:]) / cell).astype(np.int64)
    upper = np.floor(np.maximum(points[:-1], points[1:]) / cell).astype(np.int64)

    cells: dict[tuple[int, int], list[int]] = collections.defaultdict(list)
    for index in range(len(points) - 1):
        for cx in range(lower[index, 0], upper[index, 0] + 1):
            for cz in range(lower[index, 1], upper[index, 1] + 1):
                cells[(cx, cz)].append(index)

    candidates: set[tuple[int, int]] = set()
    for members in cells.values():
        for k, i in enumerate(members):
            for j in members[k + 1 :]:
                if abs(i - j) > 1:
                    candidates.add((min(i, j), max(i, j)))

    for i, j in sorted(candidates):
        crossing = _proper_crossing(points, i, j)
        if crossing is not None:
            return crossing
    return None


def first_self_crossing_brute_force(points: np.ndarray) -> SegmentCrossing | None:
    """All-pairs reference for first_self_crossing, vectorized over the second segment."""
    n = len(points) - 1
    starts, directions = points[:-1], np.diff(points, axis=0)
    norms = np.hypot(directions[:, 0], directions[:, 1])
    for i in range(n - 2):
        a = directions[i]
        b = directions[i + 2 :]
        c = starts[i + 2 :] - starts[i]
        denominator = a[0] * b[:, 1] - a[1] * b[:, 0]
        regular = np.abs(denominator) > MIN_CROSSING_SINE * norms[i] * norms[i + 2 :]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (c[:, 0] * b[:, 1] - c[:, 1] * b[:, 0]) / denominator
            u = (c[:, 0] * a[1] - c[:, 1] * a[0]) / denominator
        hits = np.flatnonzero(regular & (t > 0) & (t < 1) & (u > 0) & (u < 1))
        if hits.size:
            return _proper_crossing(points, i, i + 2 + int(hits[0]))
    return None
