from unittest.mock import MagicMock

import pytest

from app.weingarten import views
from app.weingarten.utils import exceptions


@pytest.mark.asyncio
class TestClassifyView:
    async def test_concave_graph(self, weingarten_test_client):
        client = await weingarten_test_client

        resp = await client.post("/api/v1/classify", json={"kind": "principal_linear", "a": 1, "b": 2, "c": 1})  # act

        body = await resp.json()
        assert resp.status == 200
        assert body["shapeClass"] == "ConcaveGraphToBoundary"
        assert body["graphOverL"] is True

    async def test_trivial_relation(self, weingarten_test_client):
        client = await weingarten_test_client

        resp = await client.post("/api/v1/classify", json={"kind": "principal_linear", "a": 0, "b": 1, "c": 1})  # act

        assert resp.status == 200
        assert (await resp.json())["shapeClass"] == "ConstantPrincipalCurvature"

    async def test_relation_without_curvature(self, weingarten_test_client):
        client = await weingarten_test_client

        resp = await client.post("/api/v1/classify", json={"kind": "mean_gauss", "a": 0, "b": 0, "c": 1})  # act

        assert resp.status == 400
        assert "does not involve any curvature" in (await resp.json())["error"]

    async def test_unknown_kind_is_rejected(self, weingarten_test_client):
        client = await weingarten_test_client

        resp = await client.post("/api/v1/classify", json={"kind": "cubic", "a": 1, "b": 1})  # act

        assert resp.status == 400


@pytest.mark.asyncio
class TestVerifyView:
    async def test_incomplete_graph_is_reconciled(self, weingarten_test_client):
        client = await weingarten_test_client

        resp = await client.post("/api/v1/verify", json={"kind": "mean_gauss", "a": 2, "b": -3})  # act

        body = await resp.json()
        assert resp.status == 200
        assert body["passed"] is True
        assert body["failures"] == []
        assert body["verdict"]["shapeClass"] == "ConvexGraphIncomplete"
        assert body["states"] > 0

    async def test_trivial_relation_is_vacuous(self, weingarten_test_client):
        client = await weingarten_test_client

        resp = await client.post("/api/v1/verify", json={"kind": "principal_linear", "a": 1, "b": 0, "c": 2})  # act

        body = await resp.json()
        assert resp.status == 200
        assert body["vacuous"] is True
        assert body["states"] == 0

    async def test_window_is_bounded(self, weingarten_test_client):
        client = await weingarten_test_client

        resp = await client.post(
            "/api/v1/verify", json={"kind": "principal_linear", "a": 1, "b": -3, "c": 1, "max_arclength": 500}
        )  # act

        assert resp.status == 400

    async def test_step_failure(self, weingarten_test_client, monkeypatch):
        monkeypatch.setattr(
            views.WeingartenService,
            "verify_response",
            MagicMock(side_effect=exceptions.StepFailureException("step size underflow")),
        )
        client = await weingarten_test_client

        resp = await client.post("/api/v1/verify", json={"kind": "principal_linear", "a": 1, "b": -3, "c": 1})  # act

        assert resp.status == 400
        assert (await resp.json())["error"] == "step size underflow"
