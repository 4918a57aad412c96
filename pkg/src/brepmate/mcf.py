"""Mating coordinate frames: enumeration, frame resolution, equivalence.

An MCF is an origin reference (entity + origin type) plus an orientation
reference that supplies the frame's z-axis; the remaining axes derive
from the frame the part was modeled in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .brep.model import Entity, McfRef, Part
from .errors import DegenerateFrameError, UnsupportedOrientationError
from .geometry import Frame, align_transform, frame_from_z, frames_equivalent, normalized

__all__ = [
    "ORIGIN_TYPES", "ORIGIN_TYPE_INDEX", "ORIGIN_APPLICABILITY",
    "DEFAULT_TOL_POS", "DEFAULT_TOL_ANG", "Mcf",
    "resolve_z_axis", "resolve_frame", "resolve_mcf",
    "enumerate_mcfs", "mcfs_equivalent", "align_transform",
]

# One-hot order of origin types; fixed, consumed by the classifier head.
ORIGIN_TYPES = (
    "center", "centroid", "mid_point", "point",
    "top_axis_point", "mid_axis_point", "bottom_axis_point",
)
ORIGIN_TYPE_INDEX = {t: i for i, t in enumerate(ORIGIN_TYPES)}

# entity function kind -> applicable origin types
ORIGIN_APPLICABILITY = {
    "circle": ("center",),
    "ellipse": ("center",),
    "inner_loop": ("center",),
    "plane": ("centroid",),
    "line": ("mid_point",),
    "point": ("point",),
    "cone": ("point", "top_axis_point", "mid_axis_point", "bottom_axis_point"),
    "cylinder": ("top_axis_point", "mid_axis_point", "bottom_axis_point"),
    "torus": ("top_axis_point", "mid_axis_point", "bottom_axis_point"),
    "spun": ("top_axis_point", "mid_axis_point", "bottom_axis_point"),
}

DEFAULT_TOL_POS = 1e-6
DEFAULT_TOL_ANG = 1e-6


@dataclass(frozen=True)
class Mcf:
    """A mating coordinate frame with its resolved rigid frame attached."""

    origin_ref: str
    origin_type: str
    orient_ref: str
    frame: Frame

    def ref(self) -> McfRef:
        return McfRef(self.origin_ref, self.origin_type, self.orient_ref)


def resolve_z_axis(part: Part, orient_ref: str) -> np.ndarray:
    """z-axis supplied by an orientation entity.

    plane: its normal. cylinder/cone/torus: the axis parameter. inner
    loop of a planar face: that plane's normal. line: its direction.
    circle/ellipse: the normal of an adjacent planar face when one
    exists, otherwise the curve's own normal. point: the part frame's
    z-axis. Everything else (including spun, whose axis is not carried
    in this format) is unsupported.
    """
    e = part.entity(orient_ref)
    kind = e.function.kind
    if kind == "plane":
        return normalized(np.asarray(e.function.param("normal"), dtype=float))
    if kind in ("cylinder", "cone", "torus"):
        return normalized(np.asarray(e.function.param("axis"), dtype=float))
    if kind == "inner_loop":
        face = part.owning_face_of_loop(orient_ref)
        if face is None or face.function.kind != "plane":
            raise UnsupportedOrientationError(
                f"entity {orient_ref!r}: inner loop orientation requires a planar owning face")
        return normalized(np.asarray(face.function.param("normal"), dtype=float))
    if kind == "line":
        return normalized(np.asarray(e.function.param("direction"), dtype=float))
    if kind in ("circle", "ellipse"):
        for face in part.faces_of_edge(orient_ref):
            if face.function.kind == "plane":
                return normalized(np.asarray(face.function.param("normal"), dtype=float))
        return normalized(np.asarray(e.function.param("normal"), dtype=float))
    if kind == "point":
        return part.frame.z.copy()
    raise UnsupportedOrientationError(
        f"entity {orient_ref!r}: kind {kind!r} cannot supply a z-axis")


def _axis_line(e: Entity) -> tuple[np.ndarray, np.ndarray]:
    if "axis" not in e.function.parameters:
        raise DegenerateFrameError(
            f"entity {e.id!r}: kind {e.function.kind!r} carries no axis parameter")
    return e.function.origin, normalized(np.asarray(e.function.param("axis"), dtype=float))


def _boundary_axis_extents(part: Part, face: Entity) -> tuple[float, float]:
    """Min/max projection of the face's boundary geometry onto its axis.

    Uses the boundary edges' summary data (center of mass and bounding
    box corners) as the projected point set.
    """
    _, axis = _axis_line(face)
    projections = []
    for loop in part.loops_of_face(face.id):
        for eid in loop.refs:
            s = part.entity(eid).summary
            projections.append(float(s.center_of_mass @ axis))
            lo, hi = s.aabb_min, s.aabb_max
            for sx in (lo[0], hi[0]):
                for sy in (lo[1], hi[1]):
                    for sz in (lo[2], hi[2]):
                        projections.append(float(np.array([sx, sy, sz]) @ axis))
    if not projections:
        raise DegenerateFrameError(f"face {face.id!r} has no boundary geometry to project")
    return min(projections), max(projections)


def _resolve_origin(part: Part, origin_ref: str, origin_type: str) -> np.ndarray:
    e = part.entity(origin_ref)
    kind = e.function.kind
    if origin_type not in ORIGIN_APPLICABILITY.get(kind, ()):
        raise DegenerateFrameError(
            f"origin type {origin_type!r} does not apply to kind {kind!r} ({origin_ref!r})")
    if origin_type == "center":
        if kind == "inner_loop":
            # arc-length-weighted mean of member edge centers
            edges = part.edges_of_loop(origin_ref)
            weights = np.array([ed.summary.size for ed in edges])
            if weights.sum() <= 0:
                raise DegenerateFrameError(f"loop {origin_ref!r} has zero total length")
            centers = np.vstack([ed.summary.center_of_mass for ed in edges])
            return (weights[:, None] * centers).sum(axis=0) / weights.sum()
        return e.function.origin.copy()
    if origin_type == "centroid":
        return e.summary.center_of_mass.copy()
    if origin_type == "mid_point":
        if len(e.refs) != 2:
            raise DegenerateFrameError(f"line {origin_ref!r} needs two bounding vertices")
        pa = part.entity(e.refs[0]).function.param("position")
        pb = part.entity(e.refs[1]).function.param("position")
        return (np.asarray(pa, dtype=float) + np.asarray(pb, dtype=float)) / 2.0
    if origin_type == "point":
        # vertex position, or a cone's apex (the function origin)
        if kind == "point":
            return np.asarray(e.function.param("position"), dtype=float).copy()
        return e.function.origin.copy()
    # top/mid/bottom axis point
    anchor, axis = _axis_line(e)
    lo, hi = _boundary_axis_extents(part, e)
    if origin_type == "top_axis_point":
        t = hi
    elif origin_type == "bottom_axis_point":
        t = lo
    else:
        t = (lo + hi) / 2.0
    return anchor + (t - float(anchor @ axis)) * axis


def resolve_frame(part: Part, origin_ref: str, origin_type: str, orient_ref: str) -> Frame:
    """Resolve an MCF reference into a rigid frame on the part."""
    origin = _resolve_origin(part, origin_ref, origin_type)
    z = resolve_z_axis(part, orient_ref)
    return frame_from_z(origin, z, part.frame.x, part.frame.y)


def resolve_mcf(part: Part, ref: McfRef) -> Mcf:
    return Mcf(ref.origin_ref, ref.origin_type, ref.orient_ref,
               resolve_frame(part, ref.origin_ref, ref.origin_type, ref.orient_ref))


def enumerate_mcfs(part: Part, selected_face: str) -> list[Mcf]:
    """All MCFs anchored to a selected face.

    The selected face is the orientation reference of every result;
    origin candidates are the face itself, its loops, their edges, and
    their vertices, each with every applicable origin type. Faces whose
    kind supports no z-axis yield an empty list. Order is deterministic:
    origin entity id, then origin-type order.
    """
    face = part.entity(selected_face)
    if face.tier != "face":
        raise DegenerateFrameError(f"{selected_face!r} is not a face")
    try:
        resolve_z_axis(part, selected_face)
    except UnsupportedOrientationError:
        return []

    candidates: dict[str, Entity] = {face.id: face}
    for loop in part.loops_of_face(selected_face):
        candidates[loop.id] = loop
        for eid in loop.refs:
            edge = part.entity(eid)
            candidates[edge.id] = edge
            for vid in edge.refs:
                candidates[vid] = part.entity(vid)

    out = []
    for origin_id in sorted(candidates):
        kind = candidates[origin_id].function.kind
        for origin_type in ORIGIN_APPLICABILITY.get(kind, ()):
            try:
                frame = resolve_frame(part, origin_id, origin_type, selected_face)
            except DegenerateFrameError:
                continue
            out.append(Mcf(origin_id, origin_type, selected_face, frame))
    out.sort(key=lambda m: (m.origin_ref, ORIGIN_TYPE_INDEX[m.origin_type]))
    return out


def mcfs_equivalent(frame_a: Frame, frame_b: Frame,
                    tol_pos: float = DEFAULT_TOL_POS,
                    tol_ang: float = DEFAULT_TOL_ANG) -> bool:
    """Frames are one mate location when origins and orientations agree."""
    return frames_equivalent(frame_a, frame_b, tol_pos, tol_ang)
