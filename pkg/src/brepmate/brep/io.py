"""Loading and canonical serialization of part and assembly files.

The canonical form sorts object keys, orders entities by id, and writes
floats as their shortest round-trippable decimal, so save(load(f)) is the
canonical form of f and saving is byte-stable.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import PartSchemaError, PartSyntaxError
from ..geometry import Frame
from .model import (
    Assembly,
    Entity,
    GeometricSummary,
    Instance,
    Mate,
    McfRef,
    ParametricFunction,
    Part,
)

_SUMMARY_FIELDS = ("center_of_mass", "aabb", "size", "moment_of_inertia")


def _floats(x):
    """Recursively convert numpy scalars/arrays to plain Python floats/lists."""
    if isinstance(x, np.ndarray):
        return [_floats(v) for v in x.tolist()]
    if isinstance(x, (np.floating, np.integer)):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [_floats(v) for v in x]
    if isinstance(x, dict):
        return {k: _floats(v) for k, v in x.items()}
    return x


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise PartSchemaError(f"{where}: missing field {key!r}")
    return obj[key]


def _vec(obj, where: str) -> np.ndarray:
    try:
        v = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise PartSchemaError(f"{where}: expected a numeric vector") from None
    if v.shape != (3,):
        raise PartSchemaError(f"{where}: expected 3 components, got shape {v.shape}")
    return v


def _parse_summary(obj: dict, where: str) -> GeometricSummary:
    for f in _SUMMARY_FIELDS:
        _require(obj, f, where)
    aabb = obj["aabb"]
    moi = np.asarray(_require(obj, "moment_of_inertia", where), dtype=float)
    if moi.shape != (6,):
        raise PartSchemaError(f"{where}: moment_of_inertia must have 6 entries")
    try:
        size = float(obj["size"])
    except (TypeError, ValueError):
        raise PartSchemaError(f"{where}: size is not a scalar") from None
    return GeometricSummary(
        center_of_mass=_vec(obj["center_of_mass"], where),
        aabb_min=_vec(_require(aabb, "min", where), where),
        aabb_max=_vec(_require(aabb, "max", where), where),
        size=size,
        moment_of_inertia=moi,
    )


def _parse_function(obj: dict, where: str) -> ParametricFunction:
    kind = _require(obj, "kind", where)
    params = _require(obj, "parameters", where)
    if not isinstance(params, dict):
        raise PartSchemaError(f"{where}: parameters must be an object")
    origin = _vec(_require(obj, "origin", where), where)
    parsed = {}
    for name, value in params.items():
        if isinstance(value, (list, tuple)):
            parsed[name] = _vec(value, f"{where} parameter {name!r}")
        else:
            parsed[name] = value
    return ParametricFunction(kind=kind, parameters=parsed, origin=origin)


def _parse_entity(obj: dict, tier: str, ref_key: str | None, where: str) -> Entity:
    eid = _require(obj, "id", where)
    if not isinstance(eid, str):
        raise PartSchemaError(f"{where}: entity id must be a string")
    fn = _parse_function(_require(obj, "function", f"{where} {eid!r}"), f"{where} {eid!r}")
    summary = _parse_summary(_require(obj, "summary", f"{where} {eid!r}"), f"{where} {eid!r}")
    refs: tuple = ()
    if ref_key is not None:
        raw = _require(obj, ref_key, f"{where} {eid!r}")
        if not isinstance(raw, list) or not all(isinstance(r, str) for r in raw):
            raise PartSchemaError(f"{where} {eid!r}: {ref_key} must be a list of ids")
        refs = tuple(raw)
    elif "bounded_by" in obj:
        raw = obj["bounded_by"]
        if not isinstance(raw, list) or not all(isinstance(r, str) for r in raw):
            raise PartSchemaError(f"{where} {eid!r}: bounded_by must be a list of ids")
        refs = tuple(raw)
    return Entity(id=eid, tier=tier, function=fn, summary=summary, refs=refs)


def part_from_dict(obj: dict) -> Part:
    pid = _require(obj, "id", "part")
    pf = _require(obj, "part_frame", f"part {pid}")
    frame = Frame(
        origin=_vec(_require(pf, "origin", "part_frame"), "part_frame origin"),
        x=_vec(_require(pf, "x", "part_frame"), "part_frame x"),
        y=_vec(_require(pf, "y", "part_frame"), "part_frame y"),
        z=_vec(_require(pf, "z", "part_frame"), "part_frame z"),
    )
    vertices = tuple(_parse_entity(e, "vertex", None, "vertex") for e in _require(obj, "vertices", f"part {pid}"))
    edges = tuple(_parse_entity(e, "edge", "bounded_by", "edge") for e in _require(obj, "edges", f"part {pid}"))
    loops = tuple(_parse_entity(e, "loop", "ordered_edges", "loop") for e in _require(obj, "loops", f"part {pid}"))
    faces = tuple(_parse_entity(e, "face", "bounded_by", "face") for e in _require(obj, "faces", f"part {pid}"))
    return Part(id=pid, frame=frame, vertices=vertices, edges=edges, loops=loops, faces=faces)


def load_part(data: bytes | str) -> Part:
    """Parse, validate, and return a Part; raises categorized errors."""
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise PartSyntaxError(f"malformed part file: {exc}") from None
    if not isinstance(obj, dict):
        raise PartSchemaError("part file must be a JSON object")
    return part_from_dict(obj)


def _entity_to_dict(e: Entity) -> dict:
    d = {
        "id": e.id,
        "function": {
            "kind": e.function.kind,
            "parameters": _floats(e.function.parameters),
            "origin": _floats(e.function.origin),
        },
        "summary": {
            "center_of_mass": _floats(e.summary.center_of_mass),
            "aabb": {"min": _floats(e.summary.aabb_min), "max": _floats(e.summary.aabb_max)},
            "size": float(e.summary.size),
            "moment_of_inertia": _floats(e.summary.moment_of_inertia),
        },
    }
    if e.tier == "edge":
        d["bounded_by"] = list(e.refs)
    elif e.tier == "loop":
        d["ordered_edges"] = list(e.refs)
    elif e.tier == "face":
        d["bounded_by"] = list(e.refs)
    return d


def part_to_dict(part: Part) -> dict:
    return {
        "id": part.id,
        "part_frame": {
            "origin": _floats(part.frame.origin),
            "x": _floats(part.frame.x),
            "y": _floats(part.frame.y),
            "z": _floats(part.frame.z),
        },
        "vertices": [_entity_to_dict(e) for e in sorted(part.vertices, key=lambda e: e.id)],
        "edges": [_entity_to_dict(e) for e in sorted(part.edges, key=lambda e: e.id)],
        "loops": [_entity_to_dict(e) for e in sorted(part.loops, key=lambda e: e.id)],
        "faces": [_entity_to_dict(e) for e in sorted(part.faces, key=lambda e: e.id)],
    }


def save_part(part: Part) -> bytes:
    """Canonical byte serialization; load(save(p)) structurally equals p."""
    return json.dumps(part_to_dict(part), sort_keys=True, separators=(",", ":")).encode()


def _mcf_ref_to_dict(m: McfRef) -> dict:
    return {"origin_ref": m.origin_ref, "origin_type": m.origin_type, "orient_ref": m.orient_ref}


def _parse_mcf_ref(obj: dict, where: str) -> McfRef:
    return McfRef(
        origin_ref=_require(obj, "origin_ref", where),
        origin_type=_require(obj, "origin_type", where),
        orient_ref=_require(obj, "orient_ref", where),
    )


def mate_to_dict(m: Mate) -> dict:
    d = {
        "a": m.a,
        "b": m.b,
        "mcf_a": _mcf_ref_to_dict(m.mcf_a),
        "mcf_b": _mcf_ref_to_dict(m.mcf_b),
        "mate_type": m.mate_type,
    }
    if m.dof_note:
        d["dof_note"] = m.dof_note
    return d


def mate_from_dict(obj: dict) -> Mate:
    return Mate(
        a=_require(obj, "a", "mate"),
        b=_require(obj, "b", "mate"),
        mcf_a=_parse_mcf_ref(_require(obj, "mcf_a", "mate"), "mcf_a"),
        mcf_b=_parse_mcf_ref(_require(obj, "mcf_b", "mate"), "mcf_b"),
        mate_type=_require(obj, "mate_type", "mate"),
        dof_note=obj.get("dof_note", ""),
    )


def assembly_from_dict(obj: dict) -> Assembly:
    aid = _require(obj, "id", "assembly")
    instances = []
    for raw in _require(obj, "instances", f"assembly {aid}"):
        pose = np.asarray(_require(raw, "pose", "instance"), dtype=float)
        if pose.shape == (16,):
            pose = pose.reshape(4, 4)
        instances.append(Instance(id=_require(raw, "id", "instance"),
                                  part=_require(raw, "part", "instance"), pose=pose))
    mates = tuple(mate_from_dict(m) for m in _require(obj, "mates", f"assembly {aid}"))
    return Assembly(id=aid, instances=tuple(instances), mates=mates)


def load_assembly(data: bytes | str) -> Assembly:
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise PartSyntaxError(f"malformed assembly file: {exc}") from None
    if not isinstance(obj, dict):
        raise PartSchemaError("assembly file must be a JSON object")
    return assembly_from_dict(obj)


def assembly_to_dict(asm: Assembly) -> dict:
    return {
        "id": asm.id,
        "instances": [
            {"id": i.id, "part": i.part, "pose": _floats(i.pose.reshape(-1))}
            for i in sorted(asm.instances, key=lambda i: i.id)
        ],
        "mates": [mate_to_dict(m) for m in asm.mates],
    }


def save_assembly(asm: Assembly) -> bytes:
    return json.dumps(assembly_to_dict(asm), sort_keys=True, separators=(",", ":")).encode()
