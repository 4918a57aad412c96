"""HTTP service contracts over trained micro models."""

import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient

from brepmate.brep import part_to_dict, save_part
from brepmate.forge import make_box, make_capped_cylinder
from brepmate.geometry import Frame
from brepmate.nn import save_checkpoint
from brepmate.service import build_app, suggest


@pytest.fixture(scope="module")
def client(tmp_path_factory, micro_models):
    loc_model, typ_model = micro_models
    root = tmp_path_factory.mktemp("ckpts")
    loc_path = str(root / "loc.json")
    typ_path = str(root / "typ.json")
    save_checkpoint(loc_model.store, loc_path)
    save_checkpoint(typ_model.store, typ_path)
    parts = {
        "cube_a": make_box("cube_a", 1.0, 1.0, 1.0),
        "cube_b": make_box("cube_b", 1.0, 1.0, 1.0),
        "peg": make_capped_cylinder("peg", 0.2, 0.5),
    }
    app = build_app(loc_path, typ_path, parts)
    return TestClient(app)


def test_health(client):
    r = client.get("/api/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert body["model_hash"]
    assert body["type_model_hash"]


def test_upload_and_fetch_part(client):
    doc = part_to_dict(make_box("uploaded", 0.5, 0.4, 0.3))
    r = client.post("/api/parts", json=doc)
    assert r.status_code == 200
    assert r.json() == {"part_id": "uploaded"}
    r2 = client.get("/api/parts/uploaded")
    assert r2.status_code == 200
    assert r2.json()["id"] == "uploaded"


def test_upload_invalid_part_is_400(client):
    doc = part_to_dict(make_box("broken", 0.5, 0.4, 0.3))
    doc["loops"][0]["ordered_edges"] = ["e99"]
    r = client.post("/api/parts", json=doc)
    assert r.status_code == 400
    assert "e99" in r.json()["detail"]


def test_fetch_unknown_part_404(client):
    assert client.get("/api/parts/nope").status_code == 404


def test_mesh_endpoint(client):
    r = client.get("/api/parts/peg/mesh", params={"resolution": 16})
    assert r.status_code == 200
    body = r.json()
    side = sum(1 for f in body["face_of_triangle"] if f == "f_side")
    assert side == 32
    assert len(body["triangles"]) == len(body["face_of_triangle"])


def test_suggest_two_cubes(client):
    req = {"part_a": "cube_a", "part_b": "cube_b", "face_a": "f_zmax", "face_b": "f_zmin", "k": 6}
    r = client.post("/api/suggest", json=req)
    assert r.status_code == 200
    body = r.json()
    assert body["candidate_count"] == 81
    assert body["truncated"] is False
    assert len(body["suggestions"]) == 6
    ranks = [s["rank"] for s in body["suggestions"]]
    assert ranks == list(range(1, 7))
    scores = [s["score"] for s in body["suggestions"]]
    assert all(a >= b for a, b in zip(scores, scores[1:]))
    assert all(0.0 < s < 1.0 for s in scores)


def test_suggest_is_deterministic_bytes(client):
    req = {"part_a": "cube_a", "part_b": "cube_b", "face_a": "f_zmax", "face_b": "f_zmin", "k": 6}
    r1 = client.post("/api/suggest", json=req)
    r2 = client.post("/api/suggest", json=req)
    assert r1.content == r2.content


def test_suggest_unknown_face_404_names_id(client):
    req = {"part_a": "cube_a", "part_b": "cube_b", "face_a": "f_missing", "face_b": "f_zmin"}
    r = client.post("/api/suggest", json=req)
    assert r.status_code == 404
    assert "f_missing" in r.json()["detail"]


def test_suggest_transform_reproduces_frame(client):
    req = {"part_a": "cube_a", "part_b": "peg", "face_a": "f_zmax", "face_b": "f_side", "k": 4}
    r = client.post("/api/suggest", json=req)
    assert r.status_code == 200
    for s in r.json()["suggestions"]:
        t = np.asarray(s["transform_b"]).reshape(4, 4)
        fb = s["frame_b"]
        frame_b = Frame(np.asarray(fb["origin"]), np.asarray(fb["x"]), np.asarray(fb["y"]), np.asarray(fb["z"]))
        fa = s["frame_a"]
        frame_a = Frame(np.asarray(fa["origin"]), np.asarray(fa["x"]), np.asarray(fa["y"]), np.asarray(fa["z"]))
        assert np.allclose(t @ frame_b.matrix(), frame_a.matrix(), atol=1e-9)
        r_block = t[:3, :3]
        assert np.allclose(r_block.T @ r_block, np.eye(3), atol=1e-9)


def test_suggest_k1_single_candidate_rank1(client):
    req = {"part_a": "cube_a", "part_b": "cube_b", "face_a": "f_zmax", "face_b": "f_zmin", "k": 1}
    r = client.post("/api/suggest", json=req)
    body = r.json()
    assert len(body["suggestions"]) == 1
    assert body["suggestions"][0]["rank"] == 1
    assert 0.0 < body["suggestions"][0]["score"] < 1.0


def test_merge_equivalent_collapses_aliases(client):
    # 9 x 5 = 45 candidate pairs; the peg side's axis points alias its rim
    # circle centers, leaving 9 x 3 = 27 distinct locations
    base = {"part_a": "cube_a", "part_b": "peg", "face_a": "f_zmax", "face_b": "f_side", "k": 50}
    plain = client.post("/api/suggest", json=base).json()
    merged = client.post("/api/suggest", json={**base, "merge_equivalent": True}).json()
    assert len(plain["suggestions"]) == 45
    assert len(merged["suggestions"]) == 27
    # merged list has no frame-equivalent pair left
    frames = [(np.asarray(s["frame_a"]["origin"]), np.asarray(s["frame_b"]["origin"]))
              for s in merged["suggestions"]]
    for i in range(len(frames)):
        for j in range(i + 1, len(frames)):
            same_a = np.allclose(frames[i][0], frames[j][0], atol=1e-9)
            same_b = np.allclose(frames[i][1], frames[j][1], atol=1e-9)
            assert not (same_a and same_b)


def test_mate_type_probabilities(client):
    req = {
        "part_a": "cube_a", "part_b": "cube_b",
        "mcf_a": {"origin_ref": "f_zmax", "origin_type": "centroid", "orient_ref": "f_zmax"},
        "mcf_b": {"origin_ref": "f_zmin", "origin_type": "centroid", "orient_ref": "f_zmin"},
    }
    r = client.post("/api/mate-type", json=req)
    assert r.status_code == 200
    types = r.json()["types"]
    assert len(types) == 8
    probs = [t["probability"] for t in types]
    assert sum(probs) == pytest.approx(1.0, abs=1e-6)
    assert all(a >= b for a, b in zip(probs, probs[1:]))


def test_mate_type_invalid_reference_404(client):
    req = {
        "part_a": "cube_a", "part_b": "cube_b",
        "mcf_a": {"origin_ref": "nope", "origin_type": "centroid", "orient_ref": "f_zmax"},
        "mcf_b": {"origin_ref": "f_zmin", "origin_type": "centroid", "orient_ref": "f_zmin"},
    }
    assert client.post("/api/mate-type", json=req).status_code == 404


def test_concurrent_identical_requests_identical_bodies(client):
    req = {"part_a": "cube_a", "part_b": "cube_b", "face_a": "f_zmax", "face_b": "f_zmin", "k": 6}

    def call(_):
        return client.post("/api/suggest", json=req).content

    with ThreadPoolExecutor(max_workers=8) as pool:
        bodies = list(pool.map(call, range(50)))
    assert all(b == bodies[0] for b in bodies)


def test_untrained_model_near_uniform_type_probabilities():
    # symmetry at random init: probabilities average ~1/8 over seeds
    from brepmate.model import ModelConfig, SbgcnModel
    from brepmate.service import rank_types
    from brepmate.brep.model import McfRef
    a = make_box("ua", 1.0, 1.0, 1.0)
    b = make_box("ub", 0.8, 0.8, 0.8)
    ref_a = McfRef("f_zmax", "centroid", "f_zmax")
    ref_b = McfRef("f_zmin", "centroid", "f_zmin")
    from brepmate.brep.model import MATE_TYPE_INDEX
    probs = np.zeros(8)
    seeds = 64
    for seed in range(seeds):
        model = SbgcnModel.init(ModelConfig(head="type"), seed=seed)
        for entry in rank_types(a, b, ref_a, ref_b, model):
            probs[MATE_TYPE_INDEX[entry["mate_type"]]] += entry["probability"] / seeds
    assert np.allclose(probs, 1.0 / 8.0, atol=0.06)


def test_suggest_pure_function_no_hidden_state(micro_models):
    loc_model, _ = micro_models
    a = make_box("pa", 1.0, 1.0, 1.0)
    b = make_box("pb", 1.0, 1.0, 1.0)
    r1 = suggest(a, b, "f_zmax", "f_zmin", loc_model, k=3)
    r2 = suggest(a, b, "f_zmax", "f_zmin", loc_model, k=3)
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)
