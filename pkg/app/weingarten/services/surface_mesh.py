import logging
import math

import numpy as np

from app.settings import settings
from app.weingarten import schemes
from app.weingarten.services.hyperbolic import curvatures_at
from app.weingarten.services.profile_ode import HermiteProfile
from app.weingarten.utils import exceptions
from app.weingarten.utils.managers import get_manager

__all__ = [
    "build_mesh",
    "discrete_curvature_audit",
]

logger = logging.getLogger(__name__)


def _profile_samples(
    trace: schemes.Trace, s_stride: int, s_spacing: float | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Rows (s, x, z, theta, theta'); stored rows keep the +-inf theta' of a blow-up state."""
    if s_spacing is None:
        rows = slice(None, None, s_stride)
        return trace.s[rows], trace.x[rows], trace.z[rows], trace.theta[rows], trace.theta_prime[rows]
    profile = HermiteProfile(trace)
    count = max(2, math.ceil((profile.s_max - profile.s_min) / s_spacing) + 1)
    s = np.linspace(profile.s_min, profile.s_max, count)
    x, z, theta = profile(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        theta_prime = np.asarray(get_manager(trace.relation).slope(np.maximum(z, np.finfo(float).tiny), theta))
    return s, x, z, theta, theta_prime.astype(float)


def build_mesh(
    trace: schemes.Trace,
    t_range: tuple[float, float] = (-1.0, 1.0),
    t_count: int = 2,
    s_stride: int = 1,
    s_spacing: float | None = None,
    stored_rows: bool = False,
) -> schemes.ParabolicMesh:
    """
    Sweep the profile along the horizontal direction (0, 1, 0): X(s, t) = (x(s), t, z(s)).
    Args:
        trace (schemes.Trace): integrated profile.
        t_range (tuple[float, float]): extent of the sweep.
        t_count (int): number of t samples, at least 2.
        s_stride (int): with stored_rows, keep every s_stride-th stored state.
        s_spacing (float | None): uniform arc length spacing of the rows resampled through the Hermite
            reconstruction, settings.MESH_S_SPACING when None.
        stored_rows (bool): use the stored states as rows instead of resampling.
    Returns:
        schemes.ParabolicMesh: vertex grid with per-row curvatures. Rows on the boundary or at a
            slope blow-up are dropped and listed in clamped_rows.
    Raises:
        exceptions.InsufficientDataException: If t_count < 2, the stride or the spacing is not positive or no
            row survives.
    """
    if t_count < 2:
        raise exceptions.InsufficientDataException(f"t_count must be at least 2, got {t_count}")
    if s_stride < 1:
        raise exceptions.InsufficientDataException(f"s_stride must be positive, got {s_stride}")
    if s_spacing is not None and s_spacing <= 0:
        raise exceptions.InsufficientDataException(f"s_spacing must be positive, got {s_spacing}")
    if len(trace) == 0:
        raise exceptions.InsufficientDataException("empty trace")

    spacing = None if stored_rows else (s_spacing or settings.MESH_S_SPACING)
    s, x, z, theta, theta_prime = _profile_samples(trace, s_stride, spacing)
    if trace.degenerate:
        theta_prime = np.zeros_like(s)

    regular = (z > 0) & np.isfinite(theta_prime)
    clamped = [int(i) for i in np.flatnonzero(~regular)]
    if clamped:
        logger.warning("%s: %d mesh rows clamped out (boundary or slope blow-up)", trace.relation.label(), len(clamped))
    s, x, z, theta, theta_prime = s[regular], x[regular], z[regular], theta[regular], theta_prime[regular]
    if s.size == 0:
        raise exceptions.InsufficientDataException("no regular profile rows to sweep")

    t = np.linspace(t_range[0], t_range[1], t_count)
    vertices = np.empty((s.size, t.size, 3))
    vertices[:, :, 0] = x[:, None]
    vertices[:, :, 1] = t[None, :]
    vertices[:, :, 2] = z[:, None]

    pairs = [
        curvatures_at(schemes.ProfileState(s=si, x=xi, z=zi, theta=ti), float(tp))
        for si, xi, zi, ti, tp in zip(s, x, z, theta, theta_prime)
    ]
    return schemes.ParabolicMesh(
        relation=trace.relation,
        s=s,
        t=t,
        theta=theta,
        vertices=vertices,
        kappa1=np.array([p.kappa1 for p in pairs]),
        kappa2=np.array([p.kappa2 for p in pairs]),
        h=np.array([p.h for p in pairs]),
        k=np.array([p.k for p in pairs]),
        clamped_rows=clamped,
    )


def discrete_curvature_audit(mesh: schemes.ParabolicMesh) -> schemes.CurvatureAudit:
    """
    Re-estimate the principal curvatures from the mesh rows: kappa1 = z theta' + cos(theta) with theta'
    from second order finite differences in s, kappa2 = cos(theta).
    Returns:
        schemes.CurvatureAudit: worst relative deviations from the stored curvatures and worst
            residual of the relation evaluated on the estimates.
    Raises:
        exceptions.InsufficientDataException: If the mesh has fewer than three rows.
    """
    rows = mesh.shape[0]
    if rows < 3:
        raise exceptions.InsufficientDataException(f"{rows} mesh rows are too few for finite differences")
    z = mesh.vertices[:, 0, 2]
    cos = np.cos(mesh.theta)
    kappa1 = z * np.gradient(mesh.theta, mesh.s, edge_order=2) + cos
    kappa2 = cos

    manager = get_manager(mesh.relation)
    residuals = [
        abs(manager.residual(schemes.CurvaturePair(kappa1=k1, kappa2=k2, h=(k1 + k2) / 2.0, k=k1 * k2 - 1.0)))
        for k1, k2 in zip(kappa1.tolist(), kappa2.tolist())
    ]
    return schemes.CurvatureAudit(
        rows=rows,
        max_kappa1_deviation=float(np.max(np.abs(kappa1 - mesh.kappa1) / np.maximum(1.0, np.abs(mesh.kappa1)))),
        max_kappa2_deviation=float(np.max(np.abs(kappa2 - mesh.kappa2) / np.maximum(1.0, np.abs(mesh.kappa2)))),
        max_relation_residual=float(max(residuals)),
    )
