import math

from pydantic import BaseModel, ConfigDict

from app.weingarten.schemes.relations import RelationKind

__all__ = [
    "FigurePanel",
    "GALLERY",
]


class FigurePanel(BaseModel):
    """One published generating curve: relation parameters, initial angle and z0 = 1."""

    model_config = ConfigDict(frozen=True)

    key: str
    kind: RelationKind
    params: dict[str, float]
    theta0: float = 0.0
    caption: str


def _principal(key: str, m: float, n: float, theta0: float, caption: str) -> FigurePanel:
    return FigurePanel(
        key=key, kind=RelationKind.PrincipalLinear, params={"m": m, "n": n}, theta0=theta0, caption=caption
    )


def _mean_gauss(key: str, a: float, b: float, c: float, caption: str) -> FigurePanel:
    return FigurePanel(key=key, kind=RelationKind.MeanGauss, params={"a": a, "b": b, "c": c}, caption=caption)


GALLERY: tuple[FigurePanel, ...] = (
    _principal("fig01", 1.0, 2.0, 0.0, "kappa1 = kappa2 + 2, periodic with self-intersections"),
    _principal("fig02a", 3.0, 1.0, 0.0, "kappa1 = 3 kappa2 + 1, a minimum and self-intersections"),
    _principal("fig02b", 2.0, 0.0, 0.0, "kappa1 = 2 kappa2, convex graph with a minimum"),
    _principal("fig03a", -2.0, 3.0, 0.0, "kappa1 = -2 kappa2 + 3 from a horizontal tangent, horosphere"),
    _principal("fig03b", -2.0, 3.0, math.pi / 2, "kappa1 = -2 kappa2 + 3 from a vertical tangent, asymptotic to L"),
    _principal("fig04a", -2.0, 1.0, 0.0, "kappa1 = -2 kappa2 + 1, concave graph meeting L"),
    _principal("fig04b", -2.0, 0.0, 0.0, "kappa1 = -2 kappa2, concave graph meeting L orthogonally"),
    _mean_gauss("fig05a", 2.0, 1.0, 0.0, "2H + K = 0, concave graph meeting L"),
    _mean_gauss("fig05b", 2.0, -0.7, 0.0, "2H - 0.7K = 0, not a graph, meets L"),
    _mean_gauss("fig06", 2.0, -3.0, 0.0, "2H - 3K = 0, convex graph ending at a slope blow-up"),
    _mean_gauss("fig07a", 0.5, -1.0, 1.0, "0.5H - K = 1, concave graph meeting L"),
    _mean_gauss("fig07b", 0.5, -0.8, 1.0, "0.5H - 0.8K = 1, interior slope blow-up"),
    _mean_gauss("fig08a", 0.5, -0.2, 1.0, "0.5H - 0.2K = 1, periodic with self-intersections"),
    _mean_gauss("fig08b", 0.5, 0.3, 1.0, "0.5H + 0.3K = 1, interior slope blow-up past a minimum"),
    _mean_gauss("fig09a", 2.0, -2.0, 1.0, "2H - 2K = 1, convex graph ending at a slope blow-up"),
    _mean_gauss("fig09b", 4.0, -1.5, 1.0, "4H - 1.5K = 1, meets L"),
    _principal("fig10a", 3.0, 1.0, math.pi, "kappa1 = 3 kappa2 + 1 from a reversed tangent, convex graph"),
    _principal("fig10b", -2.0, 1.0, math.pi, "kappa1 = -2 kappa2 + 1 from a reversed tangent, not a graph"),
)
