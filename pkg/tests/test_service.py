import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from lens3de.interaction import (
    EventType,
    InteractionEvent,
    InteractionState,
    Mode,
    step_interaction,
)
from lens3de.scene import load_scene
from lens3de.service import create_app, default_lens

from conftest import write_tiny_scene


@pytest.fixture
def scene(tmp_path):
    path = write_tiny_scene(
        tmp_path,
        [
            (0, [[-2.0, 0, 0], [2.0, 0, 0]]),
            (1, [[-2.0, 0.05, 0], [2.0, 0.05, 0]]),
            (2, [[50.0, 50, 50], [51.0, 50, 50]]),
        ],
    )
    return load_scene(path)


@pytest.fixture
def client(scene):
    return TestClient(create_app(scene))


def post_event(client, payload):
    return client.post("/lens/event", json={"event": payload})


class TestSceneEndpoint:
    def test_geometry_and_config(self, client, scene):
        doc = client.get("/scene").json()
        assert doc["mesh"]["vertices"] == scene.mesh.vertices.ravel().tolist()
        assert doc["lines"]["seed_ids"] == [0, 1, 2]
        assert doc["surface_focus_attribute"] == "curv"
        assert doc["flow_focus_attribute"] == "speed"
        assert doc["lens"]["radius"] > 0
        assert len(doc["lens"]["center"]) == 3


class TestLensEvents:
    def test_grab_move_ungrab_selects(self, client):
        r = post_event(client, {"type": "grab"})
        assert r.status_code == 200
        assert r.json()["mode"] == "grabbing_lens"

        r = post_event(client, {"type": "move", "position": [0.0, 0.0, 0.0]})
        assert r.json()["effects"] == ["decal_preview"]
        assert r.json()["lens"]["center"] == [0.0, 0.0, 0.0]

        r = post_event(client, {"type": "ungrab"})
        doc = r.json()
        assert doc["mode"] == "idle"
        assert doc["effects"] == ["selection_triggered"]
        assert doc["selected_seed_ids"] == [0, 1]

        assert client.get("/selection").json()["selected_seed_ids"] == [0, 1]

    def test_unknown_event_type_400_state_unchanged(self, client):
        before = client.get("/scene").json()["lens"]
        r = post_event(client, {"type": "teleport"})
        assert r.status_code == 400
        detail = r.json()["detail"]
        assert detail["code"] == "unknown_event_type"
        assert "teleport" in detail["message"]
        after = client.get("/scene").json()["lens"]
        assert before == after
        assert client.get("/selection").json()["selected_seed_ids"] == []

    def test_scale_event(self, client):
        r0 = client.get("/scene").json()["lens"]["radius"]
        post_event(client, {"type": "grab_scale"})
        r = post_event(client, {"type": "scale", "delta": 0.5})
        assert r.json()["effects"] == ["lens_scaled"]
        assert r.json()["lens"]["radius"] == pytest.approx(r0 * np.exp(0.5))

    def test_orient_reports_angular_update(self, client):
        post_event(client, {"type": "grab"})
        post_event(client, {"type": "move", "position": [0.0, 0.0, 0.0]})
        post_event(client, {"type": "ungrab"})
        post_event(client, {"type": "grab_disk"})
        r = post_event(client, {"type": "orient", "normal": [0.0, 0.0, 1.0]})
        doc = r.json()
        assert doc["effects"] == ["angular_selection_updated"]
        # both lines run along x, perpendicular to the +z normal
        assert doc["selected_seed_ids"] == []
        assert doc["lens"]["disk_normal"] == [0.0, 0.0, 1.0]


class TestToleranceSweep:
    def test_tightening_never_grows_selection(self, tmp_path):
        def tilted(angle_deg):
            d = [
                float(np.sin(np.deg2rad(angle_deg))),
                0.0,
                float(np.cos(np.deg2rad(angle_deg))),
            ]
            return [[-2 * c for c in d], [2 * c for c in d]]

        path = write_tiny_scene(
            tmp_path, [(i, tilted(a)) for i, a in enumerate((0, 10, 25, 40, 60, 85))]
        )
        scene = load_scene(path)
        client = TestClient(create_app(scene))
        post_event(client, {"type": "grab"})
        post_event(client, {"type": "move", "position": [0.0, 0.0, 0.0]})
        post_event(client, {"type": "ungrab"})
        post_event(client, {"type": "grab_disk"})
        counts = []
        for tol in (90.0, 60.0, 45.0, 30.0, 15.0):
            r = post_event(
                client, {"type": "orient", "normal": [0.0, 0.0, 1.0], "tol_deg": tol}
            )
            counts.append(len(r.json()["selected_seed_ids"]))
        assert counts[0] > counts[-1]
        assert all(b <= a for a, b in zip(counts, counts[1:]))


class TestPatchEndpoint:
    def test_patch_after_move(self, client, scene):
        post_event(client, {"type": "grab"})
        post_event(client, {"type": "move", "position": [0.0, 0.0, -3.0]})
        post_event(client, {"type": "ungrab"})
        doc = client.get("/patch").json()
        assert set(doc) == {"patch_full", "patch_partial"}
        assert doc["patch_full"] == sorted(doc["patch_full"])


class TestFrameEndpoint:
    def test_ppm_header_and_size(self, client):
        r = client.get("/frame", params={"width": 64, "height": 48})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("image/x-portable-pixmap")
        assert r.content.startswith(b"P6\n64 48\n255\n")
        assert len(r.content) == len(b"P6\n64 48\n255\n") + 64 * 48 * 3

    def test_deterministic(self, client):
        a = client.get("/frame", params={"width": 64, "height": 48}).content
        b = client.get("/frame", params={"width": 64, "height": 48}).content
        assert a == b


class TestTranscriptReplay:
    def test_http_matches_direct_stepping(self, scene):
        """Replaying a gesture transcript over HTTP must produce exactly the
        responses computed by stepping the state machine directly."""
        transcript = [
            {"type": "grab"},
            {"type": "move", "position": [0.5, 0.0, 0.0]},
            {"type": "move", "position": [0.0, 0.0, 0.0]},
            {"type": "ungrab"},
            {"type": "grab_scale"},
            {"type": "scale", "delta": 0.3},
            {"type": "scale", "delta": -0.1},
            {"type": "ungrab_scale"},
            {"type": "grab_disk"},
            {"type": "orient", "normal": [1.0, 0.0, 0.0]},
            {"type": "ungrab_disk"},
            {"type": "ungrab"},  # invalid while idle
        ]
        client = TestClient(create_app(scene))
        http_responses = [post_event(client, ev).content for ev in transcript]

        state = InteractionState(Mode.IDLE, default_lens(scene))
        expected = []
        for ev in transcript:
            event = InteractionEvent(
                type=EventType(ev["type"]),
                position=None
                if "position" not in ev
                else np.asarray(ev["position"], dtype=np.float64),
                normal=None
                if "normal" not in ev
                else np.asarray(ev["normal"], dtype=np.float64),
                delta=ev.get("delta"),
            )
            state, effects = step_interaction(state, event, scene.lines)
            selected = None
            for eff in effects:
                if eff.selection is not None:
                    selected = eff.selection.selected_seed_ids()
            doc = {
                "lens": {
                    "center": [float(x) for x in state.lens.ball.center],
                    "radius": float(state.lens.ball.radius),
                    "tol_deg": float(state.lens.angular_tolerance_deg),
                },
                "mode": state.mode.value,
                "effects": [e.kind.value for e in effects],
            }
            if state.lens.disk_normal is not None:
                doc["lens"]["disk_normal"] = [float(x) for x in state.lens.disk_normal]
            if selected is not None:
                doc["selected_seed_ids"] = selected
            expected.append(doc)

        for got_bytes, want in zip(http_responses, expected):
            assert json.loads(got_bytes) == want
