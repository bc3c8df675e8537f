import numpy as np
import pytest
from fastapi.testclient import TestClient

from moscribe.clients import StubT2MBackend, load_stub_fixtures
from moscribe.features import encode_features
from moscribe.fixtures import BPMSD_000314, demo_workspace
from moscribe.motion import motions_equal
from moscribe.motion_io import motion_from_json
from moscribe.pipeline import EditRequest, edit_motion, organize_paragraph
from moscribe.segmentation import segment
from moscribe.service import ServiceState, create_app
from moscribe.store import build_corpus, deserialize_annotations, suggest_sentences
from moscribe.textgen import BPMSDList


@pytest.fixture()
def workspace(tmp_path):
    return demo_workspace(tmp_path / "ws")


@pytest.fixture()
def state(workspace):
    return ServiceState.from_workspace(workspace)


@pytest.fixture()
def client(state):
    return TestClient(create_app(state))


def test_list_motions(client):
    assert client.get("/motions").json() == {"ids": ["000314", "demo_walk", "demo_wave"]}


def test_get_motion_with_features(client, state, skeleton):
    payload = client.get("/motions/000314").json()
    motion = motion_from_json(payload["motion"])
    assert motions_equal(motion, state.motions["000314"])
    expected = encode_features(state.motions["000314"], state.skeleton)
    np.testing.assert_allclose(np.array(payload["features"]), expected.data, atol=1e-12)


def test_unknown_motion_404(client):
    assert client.get("/motions/nope").status_code == 404


def test_snippets_from_store(client):
    payload = client.get("/motions/000314/snippets").json()
    texts = [s["text"] for s in payload["snippets"]]
    assert texts == list(BPMSD_000314)
    assert [s["start"] for s in payload["snippets"]] == list(range(0, 80, 10))


def test_put_snippet_persists(client, state):
    new_text = "Raise your right hand slightly."
    response = client.put("/motions/demo_wave/snippets/0", content=new_text)
    assert response.status_code == 200
    reloaded = client.get("/motions/demo_wave/snippets").json()
    assert reloaded["snippets"][0]["text"] == new_text
    # persisted through the store, not just in memory
    assert state.store.bpmsd()["demo_wave"][0] == new_text


def test_put_snippet_bad_index(client):
    assert client.put("/motions/demo_wave/snippets/42", content="x").status_code == 400


def test_suggest_parity_with_library(client, state):
    records = deserialize_annotations(state.store.bpmsd_path.read_bytes())
    corpus = build_corpus(records)
    expected = suggest_sentences(corpus, "raise right hand", 3)
    payload = client.get(
        "/corpus/suggest", params={"q": "raise right hand", "k": 3}
    ).json()["suggestions"]
    assert [(s["score"], s["sentence"]) for s in payload] == [
        (score, e.sentence) for score, e in expected
    ]


def test_paragraph_endpoint_parity(client, state):
    payload = client.post("/paragraph/demo_wave").json()
    texts = BPMSDList("demo_wave", state.store.bpmsd()["demo_wave"])
    expected = organize_paragraph(texts, mode="fallback", variant=0, seed=0)
    assert payload["text"] == expected.text
    assert state.store.bpmp()["demo_wave"] == [expected.text]
    second = client.post("/paragraph/demo_wave").json()
    assert second["variant"] == 1


def test_generate_endpoint_parity(client, workspace, skeleton):
    fixtures = load_stub_fixtures(workspace / "stub_fixtures.json")
    payload = client.post("/generate", json={"coarse_text": "a person walks forward"}).json()
    motion = motion_from_json(payload["motion"])
    expected = next(f.motion for f in fixtures if f.id == "demo_walk")
    assert motions_equal(motion, expected)
    assert len(payload["features"]) == len(expected.frames)
    assert len(payload["features"][0]) == 263


def test_generate_unknown_backend(client):
    response = client.post(
        "/generate", json={"coarse_text": "walk", "backend_id": "gpu-farm"}
    )
    assert response.status_code == 400


def test_edit_endpoint_parity(client, workspace, skeleton):
    fixtures = load_stub_fixtures(workspace / "stub_fixtures.json")
    walk = next(f for f in fixtures if f.id == "demo_walk")
    body = {
        "coarse_text": "a person raises the right hand and lowers it",
        "edits": [
            {"index": 0, "text": "Move forward."},
            {"index": 1, "text": "Move forward."},
        ],
    }
    payload = client.post("/edit", json=body).json()
    library = edit_motion(
        EditRequest(body["coarse_text"], tuple((e["index"], e["text"]) for e in body["edits"])),
        StubT2MBackend(fixtures),
        skeleton,
    )
    assert motions_equal(motion_from_json(payload["edited"]), library.edited)
    assert motions_equal(motion_from_json(payload["edited"]), walk.motion)
    assert payload["texts_after"] == list(library.texts_after.texts)
    # the UI decodes viewer positions from these
    expected = encode_features(library.edited, skeleton)
    np.testing.assert_allclose(np.array(payload["edited_features"]), expected.data, atol=1e-12)
    assert len(payload["initial_features"][0]) == 263


def test_edit_endpoint_bad_index(client):
    body = {"coarse_text": "x", "edits": [{"index": 99, "text": "y."}]}
    response = client.post("/edit", json=body)
    assert response.status_code == 400
    assert "out of range" in response.json()["detail"]


def test_snippets_generated_when_missing(client, state, skeleton):
    # Drop the stored annotations; the service should re-describe and persist.
    state.store.set_bpmsd("demo_walk", ["stale"])
    payload = client.get("/motions/demo_walk/snippets").json()
    motion = state.motions["demo_walk"]
    snippets = segment(motion, 0.5)
    assert len(payload["snippets"]) == len(snippets)
    assert state.store.bpmsd()["demo_walk"] == [s["text"] for s in payload["snippets"]]
