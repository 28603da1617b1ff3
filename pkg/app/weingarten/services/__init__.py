from app.weingarten.services.classifier import *
from app.weingarten.services.figures import *
from app.weingarten.services.hyperbolic import *
from app.weingarten.services.profile_ode import *
from app.weingarten.services.surface_mesh import *
from app.weingarten.services.sweep import *
from app.weingarten.services.trace_analyzer import *
from app.weingarten.services.weingarten import *

__all__ = [
    "classify",
    "classify_principal",
    "classify_meangauss",
    "classify_trivial",
    "contact_angle_root",
    "curvatures_at",
    "hyperbolic_curvature",
    "gauss_map",
    "normalize_relation",
    "principal_relation",
    "mean_gauss_relation",
    "residual",
    "rhs",
    "rhs_principal",
    "rhs_meangauss",
    "theta_second",
    "integrate",
    "ProfileIntegrator",
    "HermiteProfile",
    "max_residual",
    "first_integral_check",
    "second_derivative_check",
    "symmetry_defect",
    "extract_features",
    "asymptotic_boundary",
    "reconcile",
    "verify_trace",
    "angle_distance",
    "build_mesh",
    "discrete_curvature_audit",
    "DIAGRAM_COLUMNS",
    "CellTask",
    "sweep_options",
    "relation_for",
    "run_cell",
    "run_sweep",
    "write_diagram",
    "spec_hash",
    "find_b0",
    "WeingartenService",
    "panel_relation",
    "panel_trace",
    "render_gallery",
]
