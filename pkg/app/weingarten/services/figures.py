import logging
from pathlib import Path

from app.settings import settings
from app.weingarten import schemes
from app.weingarten.services.profile_ode import integrate
from app.weingarten.services.sweep import relation_for
from app.weingarten.utils import exports

__all__ = [
    "panel_relation",
    "panel_trace",
    "render_gallery",
]

logger = logging.getLogger(__name__)


def panel_relation(panel: schemes.FigurePanel) -> schemes.WeingartenRelation:
    return relation_for(panel.kind, panel.params)


def panel_trace(panel: schemes.FigurePanel, options: schemes.StepOptions | None = None) -> schemes.Trace:
    """Generating curve of a gallery panel from z0 = 1, drawn over the FIGURE_MAX_ARCLENGTH window by default."""
    options = options or schemes.StepOptions(max_arclength=settings.FIGURE_MAX_ARCLENGTH)
    return integrate(panel_relation(panel), schemes.InitialData(z0=1.0, theta0=panel.theta0), options)


def render_gallery(
    out: Path,
    options: schemes.StepOptions | None = None,
    panels: tuple[schemes.FigurePanel, ...] = schemes.GALLERY,
) -> list[Path]:
    """
    Write one SVG per panel, named after the panel key.
    Returns:
        list[Path]: written files in gallery order.
    """
    written = []
    for panel in panels:
        trace = panel_trace(panel, options)
        written.append(exports.write_svg(out / f"{panel.key}.svg", [trace], title=panel.caption))
        terminal = sorted(e.kind.value for e in trace.terminal.values())
        logger.info("%s: %d states, terminal %s", panel.key, len(trace), terminal)
    return written
