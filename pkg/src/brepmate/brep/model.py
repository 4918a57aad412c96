"""Portable boundary-representation data model.

A part is four tiers of topological entities (vertices, edges, loops,
faces), each carrying a parametric function, a geometric summary, and
boundary references one tier down. Parts and assemblies are immutable
after construction and validated eagerly; no partially-valid part ever
escapes the constructors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import PartIntegrityError, PartSchemaError
from ..geometry import Frame, UNIT_TOL, is_unit

# Function kinds in fixed order; the one-hot feature layout and all
# serialization rely on this ordering.
FUNCTION_KINDS = (
    "plane", "cylinder", "cone", "torus", "bsurf", "swept", "spun", "blend",
    "outer_loop", "inner_loop",
    "line", "circle", "ellipse", "bcurve", "icurve", "spcurve", "tcurve", "pline",
    "point",
)
KIND_INDEX = {k: i for i, k in enumerate(FUNCTION_KINDS)}

FACE_KINDS = frozenset(FUNCTION_KINDS[0:8])
LOOP_KINDS = frozenset(FUNCTION_KINDS[8:10])
EDGE_KINDS = frozenset(FUNCTION_KINDS[10:18])
VERTEX_KINDS = frozenset({"point"})

TIERS = ("vertex", "edge", "loop", "face")

# parameter name -> arity (3 for unit vectors / positions, 1 for scalars)
PARAMETER_SCHEMA = {
    "plane": (("normal", 3),),
    "cylinder": (("axis", 3), ("radius", 1)),
    "cone": (("axis", 3), ("half_angle", 1)),
    "torus": (("axis", 3), ("major_radius", 1), ("minor_radius", 1)),
    "line": (("direction", 3),),
    "circle": (("normal", 3), ("radius", 1)),
    "ellipse": (("normal", 3), ("major_axis_direction", 3), ("major_radius", 1), ("minor_radius", 1)),
    "point": (("position", 3),),
}
_UNIT_PARAMS = {"normal", "axis", "direction", "major_axis_direction"}


def _as_float3(value, what: str, entity: str) -> np.ndarray:
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise PartSchemaError(f"{entity}: {what} is not numeric") from None
    if v.shape != (3,):
        raise PartSchemaError(f"{entity}: {what} must have 3 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise PartSchemaError(f"{entity}: {what} contains non-finite values")
    return v


@dataclass(frozen=True)
class ParametricFunction:
    """Analytic geometry of one entity: a kind plus its fixed-arity payload.

    The origin anchors the geometry (point on plane/axis, curve center,
    cone apex, vertex position) and is kept for frame resolution but is
    never featurized.
    """

    kind: str
    parameters: dict
    origin: np.ndarray

    def validate(self, entity: str) -> None:
        if self.kind not in KIND_INDEX:
            raise PartSchemaError(f"{entity}: unknown function kind {self.kind!r}")
        schema = PARAMETER_SCHEMA.get(self.kind, ())
        expected = {name for name, _ in schema}
        got = set(self.parameters)
        if got != expected:
            raise PartSchemaError(
                f"{entity}: kind {self.kind!r} expects parameters {sorted(expected)}, got {sorted(got)}")
        for name, arity in schema:
            value = self.parameters[name]
            if arity == 3:
                v = _as_float3(value, f"parameter {name!r}", entity)
                if name in _UNIT_PARAMS and not is_unit(v):
                    raise PartIntegrityError(
                        f"{entity}: parameter {name!r} must be unit length within {UNIT_TOL}")
            else:
                try:
                    v = float(value)
                except (TypeError, ValueError):
                    raise PartSchemaError(f"{entity}: parameter {name!r} is not a scalar") from None
                if not math.isfinite(v):
                    raise PartSchemaError(f"{entity}: parameter {name!r} is not finite")
                if name in ("radius", "major_radius", "minor_radius") and v <= 0:
                    raise PartIntegrityError(f"{entity}: {name} must be strictly positive")
                if name == "half_angle" and not (0.0 < v < math.pi / 2):
                    raise PartIntegrityError(f"{entity}: half_angle must lie in (0, pi/2)")
        if self.kind == "torus" and self.parameters["major_radius"] <= self.parameters["minor_radius"]:
            raise PartIntegrityError(f"{entity}: torus major_radius must exceed minor_radius")
        if self.kind == "ellipse" and self.parameters["major_radius"] < self.parameters["minor_radius"]:
            raise PartIntegrityError(f"{entity}: ellipse major_radius must be >= minor_radius")

    def param(self, name: str):
        return self.parameters[name]


@dataclass(frozen=True)
class GeometricSummary:
    """Exact computed summaries: center of mass, AABB, size, inertia.

    size is surface area for faces, arc length for loops and edges, and 0
    for vertices. moment_of_inertia holds the 6 unique entries
    (xx, xy, xz, yy, yz, zz) of the symmetric tensor about center_of_mass.
    """

    center_of_mass: np.ndarray
    aabb_min: np.ndarray
    aabb_max: np.ndarray
    size: float
    moment_of_inertia: np.ndarray  # (6,) upper triangle

    def validate(self, entity: str) -> None:
        if np.any(self.aabb_min > self.aabb_max + 1e-12):
            raise PartIntegrityError(f"{entity}: aabb min exceeds max")
        if self.size < 0:
            raise PartIntegrityError(f"{entity}: size must be non-negative")
        if self.moment_of_inertia.shape != (6,):
            raise PartSchemaError(f"{entity}: moment_of_inertia needs 6 entries")
        if self.moment_of_inertia[0] < -1e-12 or self.moment_of_inertia[3] < -1e-12 or self.moment_of_inertia[5] < -1e-12:
            raise PartIntegrityError(f"{entity}: inertia diagonal must be non-negative")

    def inertia_tensor(self) -> np.ndarray:
        xx, xy, xz, yy, yz, zz = self.moment_of_inertia
        return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])


@dataclass(frozen=True)
class Entity:
    """One topological entity: id, tier, function, summary, boundary refs.

    refs point one tier down: edge -> vertex ids, loop -> ordered edge ids,
    face -> loop ids. Vertices have no refs.
    """

    id: str
    tier: str
    function: ParametricFunction
    summary: GeometricSummary
    refs: tuple = ()


_TIER_KINDS = {"vertex": VERTEX_KINDS, "edge": EDGE_KINDS, "loop": LOOP_KINDS, "face": FACE_KINDS}


@dataclass(frozen=True)
class Part:
    """A validated boundary-representation part."""

    id: str
    frame: Frame
    vertices: tuple
    edges: tuple
    loops: tuple
    faces: tuple
    _by_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._validate()

    def _validate(self) -> None:
        if not self.id:
            raise PartSchemaError("part id must be non-empty")
        if not self.frame.is_orthonormal():
            raise PartIntegrityError(f"part {self.id}: part_frame axes are not orthonormal")
        by_id: dict = {}
        for tier_name, entities in (("vertex", self.vertices), ("edge", self.edges),
                                    ("loop", self.loops), ("face", self.faces)):
            for e in entities:
                if not e.id:
                    raise PartSchemaError(f"part {self.id}: entity with empty id in tier {tier_name}")
                if e.id in by_id:
                    raise PartIntegrityError(f"part {self.id}: duplicate entity id {e.id!r}")
                if e.tier != tier_name:
                    raise PartSchemaError(f"part {self.id}: entity {e.id!r} tier mismatch")
                if e.function.kind not in _TIER_KINDS[tier_name]:
                    raise PartSchemaError(
                        f"part {self.id}: entity {e.id!r} kind {e.function.kind!r} not valid for tier {tier_name}")
                e.function.validate(f"part {self.id}, entity {e.id!r}")
                e.summary.validate(f"part {self.id}, entity {e.id!r}")
                by_id[e.id] = e
        vertex_ids = {e.id for e in self.vertices}
        edge_ids = {e.id for e in self.edges}
        loop_ids = {e.id for e in self.loops}
        for e in self.edges:
            for ref in e.refs:
                if ref not in vertex_ids:
                    raise PartIntegrityError(
                        f"part {self.id}: edge {e.id!r} references missing vertex {ref!r}")
        for e in self.loops:
            if not e.refs:
                raise PartIntegrityError(f"part {self.id}: loop {e.id!r} has no edges")
            for ref in e.refs:
                if ref not in edge_ids:
                    raise PartIntegrityError(
                        f"part {self.id}: loop {e.id!r} references missing edge {ref!r}")
        loop_owner: dict = {}
        for f in self.faces:
            outer = 0
            for ref in f.refs:
                if ref not in loop_ids:
                    raise PartIntegrityError(
                        f"part {self.id}: face {f.id!r} references missing loop {ref!r}")
                if ref in loop_owner:
                    raise PartIntegrityError(
                        f"part {self.id}: loop {ref!r} belongs to faces {loop_owner[ref]!r} and {f.id!r}")
                loop_owner[ref] = f.id
                if by_id[ref].function.kind == "outer_loop":
                    outer += 1
            if outer != 1:
                raise PartIntegrityError(
                    f"part {self.id}: face {f.id!r} must have exactly one outer loop, found {outer}")
        for l in self.loops:
            if l.id not in loop_owner:
                raise PartIntegrityError(f"part {self.id}: loop {l.id!r} belongs to no face")
        object.__setattr__(self, "_by_id", by_id)

    def entity(self, entity_id: str) -> Entity:
        try:
            return self._by_id[entity_id]
        except KeyError:
            from ..errors import UnknownEntityError
            raise UnknownEntityError(f"part {self.id}: no entity {entity_id!r}") from None

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._by_id

    def all_entities(self):
        """Entities in tier order vertex, edge, loop, face (declaration order)."""
        yield from self.vertices
        yield from self.edges
        yield from self.loops
        yield from self.faces

    def loops_of_face(self, face_id: str):
        face = self.entity(face_id)
        return [self.entity(r) for r in face.refs]

    def edges_of_loop(self, loop_id: str):
        loop = self.entity(loop_id)
        return [self.entity(r) for r in loop.refs]

    def faces_of_edge(self, edge_id: str):
        """All faces having a loop that contains the edge, in face order."""
        out = []
        for f in self.faces:
            if any(edge_id in self.entity(l).refs for l in f.refs):
                out.append(f)
        return out

    def owning_face_of_loop(self, loop_id: str):
        for f in self.faces:
            if loop_id in f.refs:
                return f
        return None

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        """Union of all entity bounding boxes."""
        mins = np.vstack([e.summary.aabb_min for e in self.all_entities()])
        maxs = np.vstack([e.summary.aabb_max for e in self.all_entities()])
        return mins.min(axis=0), maxs.max(axis=0)

    def max_extent(self) -> float:
        lo, hi = self.aabb()
        return float(np.max(hi - lo))


MATE_TYPES = ("fastened", "revolute", "planar", "slider", "cylindrical", "parallel", "ball", "pin_slot")
MATE_TYPE_INDEX = {t: i for i, t in enumerate(MATE_TYPES)}


@dataclass(frozen=True)
class McfRef:
    """Reference form of a mating coordinate frame: entities plus origin type."""

    origin_ref: str
    origin_type: str
    orient_ref: str


@dataclass(frozen=True)
class Mate:
    """Pairwise constraint between two instances: two MCF refs and a type."""

    a: str
    b: str
    mcf_a: McfRef
    mcf_b: McfRef
    mate_type: str
    dof_note: str = ""

    def validate(self) -> None:
        if self.mate_type not in MATE_TYPE_INDEX:
            raise PartSchemaError(f"unknown mate_type {self.mate_type!r}")
        if self.a == self.b:
            raise PartIntegrityError(f"mate references instance {self.a!r} twice")


@dataclass(frozen=True)
class Instance:
    id: str
    part: str
    pose: np.ndarray  # 4x4

    def validate(self) -> None:
        if self.pose.shape != (4, 4):
            raise PartSchemaError(f"instance {self.id!r}: pose must be 4x4")
        r = self.pose[:3, :3]
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-6):
            raise PartIntegrityError(f"instance {self.id!r}: pose rotation block not orthonormal")
        if not np.allclose(self.pose[3], [0, 0, 0, 1], atol=1e-9):
            raise PartSchemaError(f"instance {self.id!r}: pose last row must be [0,0,0,1]")


@dataclass(frozen=True)
class Assembly:
    """Flat assembly: posed part instances plus at most one mate per pair."""

    id: str
    instances: tuple
    mates: tuple

    def __post_init__(self):
        ids = set()
        for inst in self.instances:
            inst.validate()
            if inst.id in ids:
                raise PartIntegrityError(f"assembly {self.id}: duplicate instance id {inst.id!r}")
            ids.add(inst.id)
        pairs = set()
        for m in self.mates:
            m.validate()
            if m.a not in ids or m.b not in ids:
                raise PartIntegrityError(
                    f"assembly {self.id}: mate references missing instance {m.a!r}/{m.b!r}")
            key = frozenset((m.a, m.b))
            if key in pairs:
                raise PartIntegrityError(
                    f"assembly {self.id}: multiple mates between {m.a!r} and {m.b!r}")
            pairs.add(key)

    def instance(self, instance_id: str) -> Instance:
        for inst in self.instances:
            if inst.id == instance_id:
                return inst
        from ..errors import UnknownEntityError
        raise UnknownEntityError(f"assembly {self.id}: no instance {instance_id!r}")


@dataclass(frozen=True)
class TriangleMesh:
    """Triangle soup with a face id tag per triangle (UI preview payload)."""

    positions: np.ndarray       # (N, 3)
    triangles: np.ndarray       # (M, 3) int indices
    face_of_triangle: tuple     # M face ids

    def validate(self) -> None:
        if len(self.face_of_triangle) != len(self.triangles):
            raise PartSchemaError("face_of_triangle length must match triangle count")
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= len(self.positions)):
            raise PartIntegrityError("triangle index out of range")
