"""Structured BREP graphs: tiered nodes, boundary relations, face-face
meta-relations, and per-node feature vectors.

Feature layout (43 wide):
  [0..18]   one-hot function kind (fixed kind order)
  [19..26]  fixed-arity function parameters, zero padded; the ellipse
            fills all 8 (normal 3, major axis direction 3, two radii).
            Origins are never featurized, so vertices contribute zeros.
  [27..29]  center of mass
  [30..35]  aabb min, aabb max
  [36]      size (area / arc length)
  [37..42]  inertia tensor upper triangle (xx, xy, xz, yy, yz, zz)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .brep.model import Entity, GeometricSummary, KIND_INDEX, ParametricFunction, Part
from .errors import DegenerateGeometryError
from .geometry import Frame

FEATURE_DIM = 43
KIND_ONLY_DIM = 19

_PARAM_LAYOUT = {
    "plane": ("normal",),
    "cylinder": ("axis", "radius"),
    "cone": ("axis", "half_angle"),
    "torus": ("axis", "major_radius", "minor_radius"),
    "line": ("direction",),
    "circle": ("normal", "radius"),
    "ellipse": ("normal", "major_axis_direction", "major_radius", "minor_radius"),
}

TIER_ORDER = ("vertex", "edge", "loop", "face")
_ENTITY_DIMENSION = {"vertex": 0, "edge": 1, "loop": 1, "face": 2}


def feature_vector(entity: Entity) -> np.ndarray:
    f = np.zeros(FEATURE_DIM)
    f[KIND_INDEX[entity.function.kind]] = 1.0
    slot = 19
    for name in _PARAM_LAYOUT.get(entity.function.kind, ()):
        value = entity.function.param(name)
        if hasattr(value, "__len__"):
            f[slot:slot + 3] = np.asarray(value, dtype=float)
            slot += 3
        else:
            f[slot] = float(value)
            slot += 1
    s = entity.summary
    f[27:30] = s.center_of_mass
    f[30:33] = s.aabb_min
    f[33:36] = s.aabb_max
    f[36] = s.size
    f[37:43] = s.moment_of_inertia
    return f


@dataclass
class StructuredBrepGraph:
    """Four node tiers with directed boundary relations and optional
    undirected face-face meta-relations.

    Relations are stored once in the upward direction (vertex->edge,
    edge->loop, loop->face) as (src_index, dst_index) pairs with
    per-tier-local indices; transposes are the exact index swaps.
    ff pairs are unordered, stored with the smaller index first.
    """

    part_id: str
    ids: dict            # tier -> tuple of entity ids
    features: dict       # tier -> (n, 43) array
    ve: np.ndarray       # (m, 2) vertex->edge
    el: np.ndarray       # (m, 2) edge->loop
    lf: np.ndarray       # (m, 2) loop->face
    ff: np.ndarray | None = None   # (m, 2) unordered face pairs

    def node_count(self, tier: str) -> int:
        return len(self.ids[tier])

    def index_of(self, tier: str, entity_id: str) -> int:
        return self.ids[tier].index(entity_id)

    def index_of_any(self, entity_id: str) -> tuple[str, int]:
        for tier in TIER_ORDER:
            if entity_id in self._index_maps()[tier]:
                return tier, self._index_maps()[tier][entity_id]
        from .errors import UnknownEntityError
        raise UnknownEntityError(f"graph {self.part_id}: no node {entity_id!r}")

    def _index_maps(self):
        if not hasattr(self, "_maps"):
            self._maps = {t: {eid: i for i, eid in enumerate(self.ids[t])} for t in TIER_ORDER}
        return self._maps


def build_graph(part: Part) -> StructuredBrepGraph:
    """One node per entity; relations mirror the boundary references."""
    ids = {t: [] for t in TIER_ORDER}
    feats = {t: [] for t in TIER_ORDER}
    index = {}
    for tier, entities in (("vertex", part.vertices), ("edge", part.edges),
                           ("loop", part.loops), ("face", part.faces)):
        for e in entities:
            index[e.id] = len(ids[tier])
            ids[tier].append(e.id)
            feats[tier].append(feature_vector(e))

    ve, el, lf = [], [], []
    for e in part.edges:
        for v in e.refs:
            ve.append((index[v], index[e.id]))
    for l in part.loops:
        for eid in l.refs:
            el.append((index[eid], index[l.id]))
    for f in part.faces:
        for l in f.refs:
            lf.append((index[l], index[f.id]))

    def arr(pairs):
        return np.asarray(pairs, dtype=int).reshape(-1, 2)

    return StructuredBrepGraph(
        part_id=part.id,
        ids={t: tuple(v) for t, v in ids.items()},
        features={t: (np.vstack(v) if v else np.zeros((0, FEATURE_DIM))) for t, v in feats.items()},
        ve=arr(ve), el=arr(el), lf=arr(lf),
    )


def add_meta_paths(graph: StructuredBrepGraph) -> StructuredBrepGraph:
    """Connect faces that share an edge through their loops.

    Eliminates loop and edge nodes from the face<-loop<-edge->loop->face
    chain: {f1, f2} is related iff some edge lies on loops of both faces.
    Pairs are deduplicated and ordered deterministically.
    """
    loop_to_face = {l: f for l, f in graph.lf}
    edge_faces: dict[int, set] = {}
    for e, l in graph.el:
        f = loop_to_face.get(int(l))
        if f is not None:
            edge_faces.setdefault(int(e), set()).add(int(f))
    pairs = set()
    for faces in edge_faces.values():
        fs = sorted(faces)
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                pairs.add((fs[i], fs[j]))
    ff = np.asarray(sorted(pairs), dtype=int).reshape(-1, 2)
    graph.ff = ff
    return graph


# ---------------------------------------------------------------------------
# Pair normalization
# ---------------------------------------------------------------------------

def _transform_function(fn: ParametricFunction, shift: np.ndarray, s: float) -> ParametricFunction:
    params = {}
    for name, value in fn.parameters.items():
        if name == "position":
            params[name] = (np.asarray(value, dtype=float) + shift) * s
        elif name in ("radius", "major_radius", "minor_radius"):
            params[name] = float(value) * s
        else:
            params[name] = value  # unit vectors and angles are scale free
    return ParametricFunction(kind=fn.kind, parameters=params, origin=(fn.origin + shift) * s)


def _transform_summary(summary: GeometricSummary, tier: str, shift: np.ndarray, s: float) -> GeometricSummary:
    d = _ENTITY_DIMENSION[tier]
    return GeometricSummary(
        center_of_mass=(summary.center_of_mass + shift) * s,
        aabb_min=(summary.aabb_min + shift) * s,
        aabb_max=(summary.aabb_max + shift) * s,
        size=summary.size * s**d,
        # second-moment integrals over a d-dimensional entity scale as s^(d+2)
        moment_of_inertia=summary.moment_of_inertia * s**(d + 2),
    )


def transform_part(part: Part, shift, scale: float) -> Part:
    """Translate by shift, then scale uniformly about the world origin."""
    shift = np.asarray(shift, dtype=float)

    def conv(e: Entity) -> Entity:
        return Entity(
            id=e.id, tier=e.tier,
            function=_transform_function(e.function, shift, scale),
            summary=_transform_summary(e.summary, e.tier, shift, scale),
            refs=e.refs,
        )

    frame = Frame(origin=(part.frame.origin + shift) * scale,
                  x=part.frame.x, y=part.frame.y, z=part.frame.z)
    return Part(id=part.id, frame=frame,
                vertices=tuple(conv(e) for e in part.vertices),
                edges=tuple(conv(e) for e in part.edges),
                loops=tuple(conv(e) for e in part.loops),
                faces=tuple(conv(e) for e in part.faces))


def normalize_pair(a: Part, b: Part) -> tuple[Part, Part, float]:
    """Re-center both parts on their own modeling frames and scale both by
    the same factor so the largest bounding-box dimension of either part
    is exactly 1. Returns (a, b, scale)."""
    a0 = transform_part(a, -a.frame.origin, 1.0)
    b0 = transform_part(b, -b.frame.origin, 1.0)
    extent = max(a0.max_extent(), b0.max_extent())
    if extent <= 0.0:
        raise DegenerateGeometryError("both parts have zero extent; cannot normalize")
    s = 1.0 / extent
    return transform_part(a0, np.zeros(3), s), transform_part(b0, np.zeros(3), s), s


# ---------------------------------------------------------------------------
# Featurized dump (CLI `featurize`)
# ---------------------------------------------------------------------------

def graph_to_dict(graph: StructuredBrepGraph) -> dict:
    """Global-index JSON form: nodes in tier order vertex, edge, loop, face."""
    offsets = {}
    nodes = []
    for tier in TIER_ORDER:
        offsets[tier] = len(nodes)
        for i, eid in enumerate(graph.ids[tier]):
            nodes.append({
                "id": eid,
                "tier": tier,
                "feature": [float(x) for x in graph.features[tier][i]],
            })
    rel = {
        "ve": [[int(i) + offsets["vertex"], int(j) + offsets["edge"]] for i, j in graph.ve],
        "el": [[int(i) + offsets["edge"], int(j) + offsets["loop"]] for i, j in graph.el],
        "lf": [[int(i) + offsets["loop"], int(j) + offsets["face"]] for i, j in graph.lf],
        "ff": [[int(i) + offsets["face"], int(j) + offsets["face"]] for i, j in (graph.ff if graph.ff is not None else [])],
    }
    return {"nodes": nodes, "relations": rel}
