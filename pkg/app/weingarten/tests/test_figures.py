import pytest

from app.weingarten import schemes
from app.weingarten.schemes import GALLERY, ShapeClass
from app.weingarten.services import classify, max_residual, panel_relation, panel_trace, render_gallery, verify_trace

PANELS = {panel.key: panel for panel in GALLERY}


class TestGallery:
    def test_keys_are_unique(self):
        keys = [panel.key for panel in GALLERY]  # act

        assert len(keys) == len(set(keys)) == 18

    @pytest.mark.parametrize(
        "key, shape",
        [
            ("fig01", ShapeClass.PeriodicSelfIntersecting),
            ("fig02a", ShapeClass.MinimumWithSelfIntersections),
            ("fig03a", ShapeClass.Horosphere),
            ("fig03b", ShapeClass.AsymptoticToBoundary),
            ("fig05b", ShapeClass.NotAGraphToBoundary),
            ("fig06", ShapeClass.ConvexGraphIncomplete),
            ("fig07b", ShapeClass.InteriorBlowupIncomplete),
            ("fig09b", ShapeClass.NotAGraphToBoundary),
            ("fig10a", ShapeClass.ConvexGraph),
            ("fig10b", ShapeClass.NotAGraphToBoundary),
        ],
    )
    def test_panel_classes(self, key, shape):
        panel = PANELS[key]

        verdict = classify(panel_relation(panel), panel.theta0)  # act

        assert verdict.shape_class is shape


class TestGalleryTraces:
    @pytest.mark.parametrize("panel", GALLERY, ids=lambda panel: panel.key)
    def test_residual_stays_at_rounding_level(self, panel):
        trace = panel_trace(panel)

        worst = max_residual(trace)  # act

        assert worst <= 1e-8 * trace.relation.coefficient_scale

    @pytest.mark.parametrize("panel", GALLERY, ids=lambda panel: panel.key)
    def test_trace_reconciles_with_verdict(self, panel):
        trace = panel_trace(panel)

        report = verify_trace(trace)  # act

        assert report.passed is True, report.failures


class TestRenderGallery:
    def test_panel_trace_starts_at_unit_height(self):
        trace = panel_trace(PANELS["fig04a"], schemes.StepOptions(max_arclength=2.0))  # act

        assert trace.z[trace.origin_index] == 1.0
        assert trace.theta[trace.origin_index] == 0.0

    def test_writes_one_svg_per_panel(self, tmp_path):
        panels = (PANELS["fig02a"], PANELS["fig06"])

        written = render_gallery(tmp_path, schemes.StepOptions(max_arclength=2.0), panels)  # act

        assert written == [tmp_path / "fig02a.svg", tmp_path / "fig06.svg"]
        assert "<title>kappa1 = 3 kappa2 + 1" in written[0].read_text(encoding="utf-8")
