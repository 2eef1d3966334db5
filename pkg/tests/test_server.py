import json

import pytest
from fastapi.testclient import TestClient

from eigenspine import EngineConfig
from eigenspine.server import create_app

from test_engine import good_chain, make_engine


@pytest.fixture()
def state_dir(tmp_path):
    """Queue with one two-instance pending item and one single-instance."""
    script = {
        "p0": [good_chain(2)],
        "p1": [good_chain(1)],
        "p2": [good_chain()],
    }
    engine = make_engine(script, min_instances=3)
    engine.run_iteration()
    assert set(engine.pending_review_ids()) == {"p0", "p1"}
    engine.export_review_state(tmp_path)
    return tmp_path


@pytest.fixture()
def client(state_dir):
    app = create_app(state_dir, EngineConfig(min_instances=3))
    return TestClient(app)


class TestQueueEndpoints:
    def test_queue_lists_pending_sorted(self, client):
        payload = client.get("/queue").json()
        assert [item["sample_id"] for item in payload["items"]] == ["p0", "p1"]
        assert all(item["status"] == "pending" for item in payload["items"])
        assert payload["items"][0]["reasons"] == ["TOO_FEW_INSTANCES"]

    def test_sample_detail_includes_live_cobb(self, client):
        payload = client.get("/sample/p0").json()
        assert len(payload["instances"]) == 2
        assert payload["cobb"]["mt"] == pytest.approx(0.0, abs=1e-9)
        assert payload["cobb"]["pairs"]["mt"] == [0, 0]

    def test_single_instance_sample_reports_zero(self, client):
        payload = client.get("/sample/p1").json()
        assert payload["cobb"]["max"] == 0.0
        assert payload["cobb"]["pairs"]["mt"] == [0, 0]

    def test_image_served_as_png(self, client):
        response = client.get("/image/p0")
        assert response.status_code == 200
        assert response.headers["content-type"] == "image/png"
        assert response.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_unknown_ids_404(self, client):
        assert client.get("/sample/zzz").status_code == 404
        assert client.get("/image/zzz").status_code == 404


class TestResolve:
    def test_approve(self, client, state_dir):
        response = client.post(
            "/resolve", json={"sample_id": "p0", "action": "approve"}
        )
        assert response.status_code == 200
        assert response.json() == {
            "sample_id": "p0",
            "status": "approved",
            "duplicate": False,
        }
        queue = client.get("/queue").json()
        assert [item["sample_id"] for item in queue["items"]] == ["p1"]
        lines = (state_dir / "review_resolutions.jsonl").read_text().splitlines()
        assert json.loads(lines[-1]) == {"sample_id": "p0", "action": "approve"}

    def test_reject_and_flag(self, client):
        assert (
            client.post(
                "/resolve", json={"sample_id": "p0", "action": "reject"}
            ).json()["status"]
            == "rejected"
        )
        response = client.post(
            "/resolve",
            json={
                "sample_id": "p1",
                "action": "flag",
                "flags": ["UNCLEAR", "NON_REALISTIC"],
            },
        )
        assert response.json()["status"] == "rejected"
        assert client.get("/queue").json()["items"] == []

    def test_correct_with_legal_contours(self, client):
        contours = [
            [[float(x), float(y)] for x, y in inst.contour]
            for inst in good_chain(3)
        ]
        response = client.post(
            "/resolve",
            json={"sample_id": "p1", "action": "correct", "contours": contours},
        )
        assert response.json()["status"] == "corrected"
        payload = client.get("/sample/p1").json()
        assert len(payload["instances"]) == 3

    def test_correct_without_contours_422(self, client):
        response = client.post(
            "/resolve", json={"sample_id": "p0", "action": "correct"}
        )
        assert response.status_code == 422

    def test_out_of_bounds_correction_names_vertices(self, client):
        bad = [[-5.0, 0.0], [25.0, 0.0], [25.0, 20.0], [-5.0, 20.0]]
        response = client.post(
            "/resolve",
            json={"sample_id": "p0", "action": "correct", "contours": [bad]},
        )
        assert response.status_code == 422
        detail = response.json()["detail"][0]
        assert detail["contour"] == 0
        assert "ILLEGAL_COORDS" in detail["reasons"]
        assert detail["out_of_bounds_vertices"] == [0, 3]

    def test_bad_action_422(self, client):
        response = client.post(
            "/resolve", json={"sample_id": "p0", "action": "promote"}
        )
        assert response.status_code == 422

    def test_flag_requires_flags(self, client):
        response = client.post(
            "/resolve", json={"sample_id": "p0", "action": "flag"}
        )
        assert response.status_code == 422

    def test_unknown_flag_422(self, client):
        response = client.post(
            "/resolve",
            json={"sample_id": "p0", "action": "flag", "flags": ["ODD"]},
        )
        assert response.status_code == 422

    def test_unknown_sample_404(self, client):
        response = client.post(
            "/resolve", json={"sample_id": "zzz", "action": "approve"}
        )
        assert response.status_code == 404

    def test_token_dedupes_retries(self, client, state_dir):
        body = {"sample_id": "p0", "action": "approve", "token": "tok-9"}
        first = client.post("/resolve", json=body).json()
        assert first["duplicate"] is False
        second = client.post("/resolve", json=body).json()
        assert second == {
            "sample_id": "p0",
            "status": "approved",
            "duplicate": True,
        }
        lines = (state_dir / "review_resolutions.jsonl").read_text().splitlines()
        assert len(lines) == 1

    def test_validation_failure_records_nothing(self, client, state_dir):
        client.post("/resolve", json={"sample_id": "p0", "action": "flag"})
        assert not (state_dir / "review_resolutions.jsonl").exists()


class TestRestartAndEngineHandoff:
    def test_resolutions_replay_on_restart(self, client, state_dir):
        client.post(
            "/resolve",
            json={"sample_id": "p0", "action": "approve", "token": "t0"},
        )
        reborn = TestClient(create_app(state_dir, EngineConfig(min_instances=3)))
        queue = reborn.get("/queue").json()
        assert [item["sample_id"] for item in queue["items"]] == ["p1"]
        replay = reborn.post(
            "/resolve",
            json={"sample_id": "p0", "action": "approve", "token": "t0"},
        ).json()
        assert replay["duplicate"] is True

    def test_engine_consumes_server_resolutions(self, client, state_dir):
        contours = [
            [[float(x), float(y)] for x, y in inst.contour]
            for inst in good_chain(3)
        ]
        client.post(
            "/resolve",
            json={"sample_id": "p0", "action": "correct", "contours": contours},
        )
        client.post("/resolve", json={"sample_id": "p1", "action": "reject"})

        script = {
            "p0": [good_chain(2)],
            "p1": [good_chain(1)],
            "p2": [good_chain()],
        }
        engine = make_engine(script, min_instances=3)
        engine.run_iteration()
        engine.load_review_queue(state_dir / "review_queue.json")
        applied = engine.apply_resolution_file(
            state_dir / "review_resolutions.jsonl"
        )
        assert applied == 2
        result = engine.run_iteration()
        rows = {sid: (v, reasons) for sid, v, reasons in result.ledger_rows}
        assert rows["p0"][0] == 1
        assert rows["p1"] == (0, ("MANUAL_REJECT",))
        accepted = {a.sample_id: a for a in engine.snapshot()}
        assert accepted["p0"].source == "corrected"
        assert len(accepted["p0"].sample.instances) == 3
