import numpy as np
import pytest

from app.settings import settings
from app.weingarten import schemes
from app.weingarten.services import (
    build_mesh,
    discrete_curvature_audit,
    integrate,
    mean_gauss_relation,
    panel_trace,
    principal_relation,
)
from app.weingarten.utils import exceptions

INIT = schemes.InitialData()
PANELS = {panel.key: panel for panel in schemes.GALLERY}


@pytest.fixture
def loop_trace():
    return integrate(principal_relation(3.0, 1.0), INIT, schemes.StepOptions(max_arclength=1.0))


class TestBuildMesh:
    def test_vertex_grid_sweeps_the_profile(self, loop_trace):
        mesh = build_mesh(loop_trace, t_range=(-2.0, 2.0), t_count=5, stored_rows=True)  # act

        rows, cols = mesh.shape
        assert (rows, cols) == (len(loop_trace), 5)
        assert mesh.vertices.shape == (rows, 5, 3)
        assert np.allclose(mesh.vertices[:, 2, 1], 0.0)
        assert np.allclose(mesh.vertices[:, 0, 0], loop_trace.x)
        assert np.allclose(mesh.vertices[:, 4, 2], loop_trace.z)
        assert mesh.clamped_rows == []

    def test_rows_are_resampled_by_default(self, loop_trace):
        mesh = build_mesh(loop_trace)  # act

        assert mesh.s[0] == pytest.approx(loop_trace.s[0])
        assert mesh.s[-1] == pytest.approx(loop_trace.s[-1])
        assert np.allclose(np.diff(mesh.s), settings.MESH_S_SPACING, rtol=1e-2)

    def test_curvatures_satisfy_relation(self, loop_trace):
        mesh = build_mesh(loop_trace)  # act

        assert np.allclose(mesh.kappa1, 3.0 * mesh.kappa2 + 1.0, atol=1e-9)
        assert np.allclose(mesh.h, (mesh.kappa1 + mesh.kappa2) / 2.0)

    def test_stride_keeps_every_other_state(self, loop_trace):
        mesh = build_mesh(loop_trace, s_stride=2, stored_rows=True)  # act

        assert mesh.shape[0] == loop_trace.s[::2].size
        assert np.array_equal(mesh.s, loop_trace.s[::2])

    def test_horosphere_is_umbilical(self):
        trace = integrate(principal_relation(-2.0, 3.0), INIT, schemes.StepOptions(max_arclength=2.0))

        mesh = build_mesh(trace)  # act

        assert np.all(mesh.kappa1 == 1.0)
        assert np.all(mesh.k == 0.0)

    def test_blowup_rows_are_clamped(self):
        trace = integrate(mean_gauss_relation(2.0, -3.0, 0.0), INIT)

        mesh = build_mesh(trace, stored_rows=True)  # act

        assert mesh.clamped_rows == [0, len(trace) - 1]
        assert np.all(np.isfinite(mesh.kappa1))

    def test_resampling_stays_inside_the_blowup_states(self):
        trace = integrate(mean_gauss_relation(2.0, -3.0, 0.0), INIT)

        mesh = build_mesh(trace)  # act

        assert mesh.clamped_rows == []
        assert trace.s[0] < mesh.s[0] < mesh.s[-1] < trace.s[-1]
        assert np.all(np.isfinite(mesh.kappa1))

    @pytest.mark.parametrize("kwargs", [{"t_count": 1}, {"s_stride": 0}, {"s_spacing": -1e-3}])
    def test_invalid_grid(self, loop_trace, kwargs):
        with pytest.raises(exceptions.InsufficientDataException):
            build_mesh(loop_trace, **kwargs)  # act

    def test_no_regular_row(self):
        trace = integrate(mean_gauss_relation(2.0, 1.0, 0.0), schemes.InitialData(theta0=np.pi))

        with pytest.raises(exceptions.InsufficientDataException):
            build_mesh(trace)  # act


class TestCurvatureAudit:
    @pytest.mark.parametrize("key", ["fig02b", "fig05a"])
    def test_default_sampling_meets_tolerance(self, key):
        mesh = build_mesh(panel_trace(PANELS[key]))

        audit = discrete_curvature_audit(mesh)  # act

        assert audit.rows == mesh.shape[0]
        assert audit.max_kappa2_deviation == 0.0
        assert audit.max_kappa1_deviation < 1e-6

    def test_deviation_decays_at_second_order(self):
        trace = panel_trace(PANELS["fig02b"])

        coarse = discrete_curvature_audit(build_mesh(trace, s_spacing=8e-3))
        fine = discrete_curvature_audit(build_mesh(trace, s_spacing=4e-3))  # act

        assert coarse.max_kappa1_deviation / fine.max_kappa1_deviation > 3.0

    def test_stored_rows_are_coarser_than_resampled_rows(self, loop_trace):
        stored = discrete_curvature_audit(build_mesh(loop_trace, stored_rows=True))

        resampled = discrete_curvature_audit(build_mesh(loop_trace))  # act

        assert resampled.max_kappa1_deviation < stored.max_kappa1_deviation

    def test_needs_three_rows(self, loop_trace):
        mesh = build_mesh(loop_trace, s_stride=len(loop_trace), stored_rows=True)

        with pytest.raises(exceptions.InsufficientDataException):
            discrete_curvature_audit(mesh)  # act
