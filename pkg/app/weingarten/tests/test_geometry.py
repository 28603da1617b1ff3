import numpy as np
import pytest

from app.weingarten.utils.geometry import drop_repeated_points, first_self_crossing, first_self_crossing_brute_force


def _figure_eight_arc(samples: int = 401) -> np.ndarray:
    t = np.linspace(-0.3, np.pi + 0.3, samples)
    return np.column_stack([np.sin(t), np.sin(t) * np.cos(t)])


class TestFirstSelfCrossing:
    def test_simple_arc_has_no_crossing(self):
        t = np.linspace(0.0, np.pi, 200)
        points = np.column_stack([np.cos(t), 1.0 + np.sin(t)])

        crossing = first_self_crossing(points)  # act

        assert crossing is None

    def test_loop_crossing_is_located(self):
        """
        A polyline doubling back over its first segment crosses it at (0.5, 0).
        """
        points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 1.0], [0.5, -1.0]])

        crossing = first_self_crossing(points)  # act

        assert (crossing.i, crossing.j) == (0, 3)
        assert crossing.x == pytest.approx(0.5)
        assert crossing.z == pytest.approx(0.0)

    def test_agrees_with_brute_force(self):
        points = _figure_eight_arc()

        fast = first_self_crossing(points)  # act
        slow = first_self_crossing_brute_force(points)

        assert fast is not None
        assert (fast.i, fast.j) == (slow.i, slow.j)
        assert fast.x == pytest.approx(0.0, abs=1e-3)
        assert fast.z == pytest.approx(0.0, abs=1e-3)

    def test_retraced_segment_is_not_a_crossing(self):
        """
        Collinear overlapping segments are parallel, not transversal.
        """
        points = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.5, 0.0], [0.5, 0.0]])

        crossing = first_self_crossing(points)  # act

        assert crossing is None

    def test_short_polyline(self):
        assert first_self_crossing(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]])) is None  # act


class TestDropRepeatedPoints:
    def test_consecutive_duplicates_are_removed(self):
        points = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 1.0]])

        kept, index = drop_repeated_points(points)  # act

        assert kept.tolist() == [[0.0, 0.0], [1.0, 0.0], [2.0, 1.0]]
        assert index.tolist() == [0, 2, 4]

    def test_empty_input(self):
        kept, index = drop_repeated_points(np.empty((0, 2)))  # act

        assert kept.shape == (0, 2)
        assert index.size == 0
