"""HTTP suggestion service: part upload, mesh preview, ranked mate
locations, and mate-type ranking over immutable loaded models."""

from __future__ import annotations

import logging
import time

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles

from .brep.io import part_from_dict, part_to_dict
from .brep.model import McfRef, Part
from .brep.tessellate import tessellate
from .errors import BrepmateError, CheckpointError, UnknownEntityError
from .geometry import align_transform
from .graph import add_meta_paths, build_graph, normalize_pair
from .mcf import DEFAULT_TOL_ANG, DEFAULT_TOL_POS, enumerate_mcfs, mcfs_equivalent, resolve_frame
from .model import ModelConfig, SbgcnModel, build_pair_batch, candidate_arrays
from .nn import load_checkpoint

log = logging.getLogger("brepmate.service")

CANDIDATE_CAP = 10_000
DEFAULT_K = 6


def load_model(path: str) -> SbgcnModel:
    store = load_checkpoint(path)
    meta = store.metadata
    if "config" not in meta or "config_hash" not in meta:
        raise CheckpointError(f"checkpoint {path} lacks a model config")
    config = ModelConfig.from_dict(meta["config"])
    if config.hash() != meta["config_hash"]:
        raise CheckpointError(f"checkpoint {path}: config hash mismatch")
    return SbgcnModel(config, store)


def _frame_dict(frame) -> dict:
    return {
        "origin": [float(v) for v in frame.origin],
        "x": [float(v) for v in frame.x],
        "y": [float(v) for v in frame.y],
        "z": [float(v) for v in frame.z],
    }


def _mcf_dict(ref: McfRef) -> dict:
    return {"origin_ref": ref.origin_ref, "origin_type": ref.origin_type, "orient_ref": ref.orient_ref}


def suggest(part_a: Part, part_b: Part, face_a: str, face_b: str,
            model: SbgcnModel, k: int = DEFAULT_K, merge_equivalent: bool = False) -> dict:
    """Rank all MCF pairs around the two selected faces.

    Pure function of its inputs: enumeration happens on the raw parts,
    scoring on the normalized pair, and the returned frames and aligning
    transform live in part a's original coordinates.
    """
    for part, face in ((part_a, face_a), (part_b, face_b)):
        if part.entity(face).tier != "face":
            raise UnknownEntityError(f"part {part.id}: {face!r} is not a face")
    mcfs_a = enumerate_mcfs(part_a, face_a)
    mcfs_b = enumerate_mcfs(part_b, face_b)
    total = len(mcfs_a) * len(mcfs_b)
    if total == 0:
        raise BrepmateError(
            f"selection supports no mating frames (faces {face_a!r} / {face_b!r})")
    pairs = [(ma, mb) for ma in mcfs_a for mb in mcfs_b]
    truncated = total > CANDIDATE_CAP
    if truncated:
        pairs = pairs[:CANDIDATE_CAP]

    na, nb, _ = normalize_pair(part_a, part_b)
    batch = build_pair_batch(add_meta_paths(build_graph(na)), add_meta_paths(build_graph(nb)),
                             model.config.feature_set)
    refs = [(ma.ref(), mb.ref()) for ma, mb in pairs]
    emb = model.encode_pair(batch, training=False)
    logits = model.head_logits(emb, candidate_arrays(batch, refs)).data.reshape(-1)
    scores = 1.0 / (1.0 + np.exp(-logits.astype(np.float64)))

    order = np.lexsort((np.arange(len(pairs)), -scores))
    chosen = []
    for idx in order:
        ma, mb = pairs[idx]
        if merge_equivalent and any(
            mcfs_equivalent(ma.frame, ka.frame, DEFAULT_TOL_POS, DEFAULT_TOL_ANG)
            and mcfs_equivalent(mb.frame, kb.frame, DEFAULT_TOL_POS, DEFAULT_TOL_ANG)
            for _, ka, kb in chosen
        ):
            continue
        chosen.append((int(idx), ma, mb))
        if len(chosen) >= k:
            break

    suggestions = []
    for rank, (idx, ma, mb) in enumerate(chosen, start=1):
        transform = align_transform(ma.frame, mb.frame)
        suggestions.append({
            "rank": rank,
            "score": float(scores[idx]),
            "mcf_a": _mcf_dict(ma.ref()),
            "mcf_b": _mcf_dict(mb.ref()),
            "frame_a": _frame_dict(ma.frame),
            "frame_b": _frame_dict(mb.frame),
            "transform_b": [float(v) for v in transform.reshape(-1)],
        })
    return {
        "suggestions": suggestions,
        "candidate_count": total,
        "truncated": truncated,
    }


def rank_types(part_a: Part, part_b: Part, ref_a: McfRef, ref_b: McfRef,
               model: SbgcnModel) -> list[dict]:
    """Mate-type probabilities for a chosen location, descending."""
    # validate the references resolve on their parts
    resolve_frame(part_a, ref_a.origin_ref, ref_a.origin_type, ref_a.orient_ref)
    resolve_frame(part_b, ref_b.origin_ref, ref_b.origin_type, ref_b.orient_ref)
    na, nb, _ = normalize_pair(part_a, part_b)
    batch = build_pair_batch(add_meta_paths(build_graph(na)), add_meta_paths(build_graph(nb)),
                             model.config.feature_set)
    emb = model.encode_pair(batch, training=False)
    logits = model.head_logits(emb, candidate_arrays(batch, [(ref_a, ref_b)])).data.reshape(-1)
    z = logits.astype(np.float64) - logits.max()
    p = np.exp(z)
    p /= p.sum()
    from .brep.model import MATE_TYPES
    order = np.lexsort((np.arange(len(MATE_TYPES)), -p))
    return [{"mate_type": MATE_TYPES[i], "probability": float(p[i])} for i in order]


def build_app(location_model_path: str | None = None, type_model_path: str | None = None,
              parts: dict[str, Part] | None = None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="brepmate suggestion service")
    state = {
        "parts": dict(parts) if parts else {},
        "location_model": load_model(location_model_path) if location_model_path else None,
        "type_model": load_model(type_model_path) if type_model_path else None,
    }
    app.state.brepmate = state

    def get_part(part_id: str) -> Part:
        part = state["parts"].get(part_id)
        if part is None:
            raise HTTPException(status_code=404, detail=f"unknown part {part_id!r}")
        return part

    def require_model(which: str) -> SbgcnModel:
        model = state[which]
        if model is None:
            raise HTTPException(status_code=503, detail=f"{which} not loaded")
        return model

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        log.info("%s %s -> %d (%.1f ms)", request.method, request.url.path,
                 response.status_code, (time.perf_counter() - start) * 1000)
        return response

    @app.get("/api/health")
    def health():
        loc = state["location_model"]
        typ = state["type_model"]
        return {
            "status": "ok",
            "model_hash": loc.config.hash() if loc else None,
            "type_model_hash": typ.config.hash() if typ else None,
            "parts": sorted(state["parts"].keys()),
        }

    @app.post("/api/parts")
    def upload_part(body: dict):
        try:
            part = part_from_dict(body)
        except BrepmateError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        state["parts"][part.id] = part  # last write wins by id
        return {"part_id": part.id}

    @app.get("/api/parts/{part_id}")
    def fetch_part(part_id: str):
        return part_to_dict(get_part(part_id))

    @app.get("/api/parts/{part_id}/mesh")
    def fetch_mesh(part_id: str, resolution: int = 32):
        part = get_part(part_id)
        try:
            mesh = tessellate(part, resolution)
        except BrepmateError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {
            "positions": [[float(v) for v in p] for p in mesh.positions],
            "triangles": [[int(v) for v in t] for t in mesh.triangles],
            "face_of_triangle": list(mesh.face_of_triangle),
        }

    @app.post("/api/suggest")
    def api_suggest(body: dict):
        model = require_model("location_model")
        part_a = get_part(str(body.get("part_a")))
        part_b = get_part(str(body.get("part_b")))
        face_a = str(body.get("face_a"))
        face_b = str(body.get("face_b"))
        k = int(body.get("k", DEFAULT_K))
        merge = bool(body.get("merge_equivalent", False))
        for part, face in ((part_a, face_a), (part_b, face_b)):
            if not part.has_entity(face):
                raise HTTPException(status_code=404,
                                    detail=f"part {part.id!r} has no face {face!r}")
        try:
            return suggest(part_a, part_b, face_a, face_b, model, k=k, merge_equivalent=merge)
        except BrepmateError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    @app.post("/api/mate-type")
    def api_mate_type(body: dict):
        model = require_model("type_model")
        part_a = get_part(str(body.get("part_a")))
        part_b = get_part(str(body.get("part_b")))
        try:
            ref_a = McfRef(**body["mcf_a"])
            ref_b = McfRef(**body["mcf_b"])
        except (KeyError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"bad MCF reference: {exc}") from None
        try:
            return {"types": rank_types(part_a, part_b, ref_a, ref_b, model)}
        except UnknownEntityError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except BrepmateError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
