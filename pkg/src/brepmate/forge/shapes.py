"""Analytic part builders for the synthetic corpus.

Every builder emits exact geometric summaries (area/length, center of
mass, axis-aligned bounds, and the second-moment tensor about the center
of mass, all with unit density over the entity's natural measure).
Composite laminae (plates with holes, annuli) are assembled from signed
primitive moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..brep.model import Entity, GeometricSummary, ParametricFunction, Part
from ..geometry import Frame

_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])


@dataclass
class PieceMoments:
    """Signed measure, centroid, raw second moments about the centroid, bounds."""

    measure: float
    com: np.ndarray
    second: np.ndarray  # 3x3, integral of (r-com)(r-com)^T dmu
    aabb_min: np.ndarray
    aabb_max: np.ndarray


def _second_from_basis(sx: float, sy: float, sz: float,
                       u: np.ndarray, v: np.ndarray, n: np.ndarray) -> np.ndarray:
    return sx * np.outer(u, u) + sy * np.outer(v, v) + sz * np.outer(n, n)


def _plane_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pick = _EX if abs(n[0]) < 0.9 else _EY
    u = np.cross(n, pick)
    u = u / np.linalg.norm(u)
    return u, np.cross(n, u)


def rect_piece(center, u, v, half_u: float, half_v: float) -> PieceMoments:
    center = np.asarray(center, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = np.cross(u, v)
    area = 4.0 * half_u * half_v
    second = _second_from_basis(area * half_u**2 / 3.0, area * half_v**2 / 3.0, 0.0, u, v, n)
    ext = np.abs(u) * half_u + np.abs(v) * half_v
    return PieceMoments(area, center, second, center - ext, center + ext)


def disc_piece(center, normal, radius: float) -> PieceMoments:
    center = np.asarray(center, dtype=float)
    n = np.asarray(normal, dtype=float)
    u, v = _plane_basis(n)
    area = math.pi * radius**2
    s = math.pi * radius**4 / 4.0
    second = _second_from_basis(s, s, 0.0, u, v, n)
    ext = radius * np.sqrt(np.maximum(0.0, 1.0 - n**2))
    return PieceMoments(area, center, second, center - ext, center + ext)


def cylinder_side_piece(center, axis, radius: float, length: float) -> PieceMoments:
    center = np.asarray(center, dtype=float)
    n = np.asarray(axis, dtype=float)
    u, v = _plane_basis(n)
    area = 2.0 * math.pi * radius * length
    sx = area * radius**2 / 2.0
    second = _second_from_basis(sx, sx, area * length**2 / 12.0, u, v, n)
    ring = radius * np.sqrt(np.maximum(0.0, 1.0 - n**2))
    half = np.abs(n) * (length / 2.0) + ring
    return PieceMoments(area, center, second, center - half, center + half)


def cone_side_piece(apex, axis, radius: float, height: float) -> PieceMoments:
    """Lateral cone surface; apex at `apex`, base circle at apex - height*axis."""
    apex = np.asarray(apex, dtype=float)
    n = np.asarray(axis, dtype=float)
    u, v = _plane_basis(n)
    c = math.sqrt(1.0 + (radius / height) ** 2)
    area = math.pi * radius * height * c
    com = apex - (2.0 * height / 3.0) * n
    sx = math.pi * c * radius**3 * height / 4.0
    sz = math.pi * c * radius * height**3 / 18.0
    second = _second_from_basis(sx, sx, sz, u, v, n)
    base = apex - height * n
    ring = radius * np.sqrt(np.maximum(0.0, 1.0 - n**2))
    lo = np.minimum(apex, base - ring)
    hi = np.maximum(apex, base + ring)
    return PieceMoments(area, com, second, lo, hi)


def torus_piece(center, axis, major: float, minor: float) -> PieceMoments:
    center = np.asarray(center, dtype=float)
    n = np.asarray(axis, dtype=float)
    u, v = _plane_basis(n)
    area = 4.0 * math.pi**2 * major * minor
    sx = 2.0 * math.pi**2 * major**3 * minor + 3.0 * math.pi**2 * major * minor**3
    sz = 2.0 * math.pi**2 * major * minor**3
    second = _second_from_basis(sx, sx, sz, u, v, n)
    ring = (major + minor) * np.sqrt(np.maximum(0.0, 1.0 - n**2)) + minor * np.abs(n)
    return PieceMoments(area, center, second, center - ring, center + ring)


def segment_piece(p0, p1) -> PieceMoments:
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    d = p1 - p0
    length = float(np.linalg.norm(d))
    u = d / length
    second = (length**3 / 12.0) * np.outer(u, u)
    return PieceMoments(length, (p0 + p1) / 2.0, second,
                        np.minimum(p0, p1), np.maximum(p0, p1))


def circle_piece(center, normal, radius: float) -> PieceMoments:
    center = np.asarray(center, dtype=float)
    n = np.asarray(normal, dtype=float)
    u, v = _plane_basis(n)
    length = 2.0 * math.pi * radius
    s = math.pi * radius**3
    second = _second_from_basis(s, s, 0.0, u, v, n)
    ext = radius * np.sqrt(np.maximum(0.0, 1.0 - n**2))
    return PieceMoments(length, center, second, center - ext, center + ext)


def combine_pieces(pieces: list[PieceMoments]) -> PieceMoments:
    """Signed composition (holes enter with negative measure)."""
    total = sum(p.measure for p in pieces)
    com = sum(p.measure * p.com for p in pieces) / total
    raw = sum(p.second + p.measure * np.outer(p.com, p.com) for p in pieces)
    second = raw - total * np.outer(com, com)
    lo = np.min(np.vstack([p.aabb_min for p in pieces if p.measure > 0]), axis=0)
    hi = np.max(np.vstack([p.aabb_max for p in pieces if p.measure > 0]), axis=0)
    return PieceMoments(total, com, second, lo, hi)


def summary_from_piece(p: PieceMoments) -> GeometricSummary:
    inertia = np.trace(p.second) * np.eye(3) - p.second
    moi = np.array([inertia[0, 0], inertia[0, 1], inertia[0, 2],
                    inertia[1, 1], inertia[1, 2], inertia[2, 2]])
    return GeometricSummary(
        center_of_mass=p.com,
        aabb_min=p.aabb_min,
        aabb_max=p.aabb_max,
        size=float(p.measure),
        moment_of_inertia=moi,
    )


def point_summary(position) -> GeometricSummary:
    position = np.asarray(position, dtype=float)
    return GeometricSummary(position, position.copy(), position.copy(), 0.0, np.zeros(6))


def second_from_summary(s: GeometricSummary) -> np.ndarray:
    """Recover raw second moments from a stored inertia tensor."""
    inertia = s.inertia_tensor()
    return (np.trace(inertia) / 2.0) * np.eye(3) - inertia


def piece_from_summary(s: GeometricSummary) -> PieceMoments:
    return PieceMoments(s.size, s.center_of_mass, second_from_summary(s), s.aabb_min, s.aabb_max)


# ---------------------------------------------------------------------------
# Entity helpers
# ---------------------------------------------------------------------------

def _fn(kind: str, origin, **params) -> ParametricFunction:
    return ParametricFunction(kind=kind, parameters={k: (np.asarray(v, dtype=float) if hasattr(v, "__len__") else float(v)) for k, v in params.items()}, origin=np.asarray(origin, dtype=float))


def vertex_entity(eid: str, position) -> Entity:
    pos = np.asarray(position, dtype=float)
    return Entity(eid, "vertex", _fn("point", pos, position=pos), point_summary(pos))


def line_entity(eid: str, p0, p1, v0: str, v1: str) -> Entity:
    piece = segment_piece(p0, p1)
    d = (np.asarray(p1, dtype=float) - np.asarray(p0, dtype=float))
    d = d / np.linalg.norm(d)
    return Entity(eid, "edge", _fn("line", p0, direction=d), summary_from_piece(piece), (v0, v1))


def circle_entity(eid: str, center, normal, radius: float) -> Entity:
    piece = circle_piece(center, normal, radius)
    return Entity(eid, "edge", _fn("circle", center, normal=normal, radius=radius),
                  summary_from_piece(piece), ())


def loop_entity(eid: str, kind: str, edges: list[Entity]) -> Entity:
    piece = combine_pieces([piece_from_summary(e.summary) for e in edges])
    return Entity(eid, "loop", _fn(kind, piece.com), summary_from_piece(piece),
                  tuple(e.id for e in edges))


def face_entity(eid: str, fn: ParametricFunction, piece: PieceMoments, loops: list[Entity]) -> Entity:
    return Entity(eid, "face", fn, summary_from_piece(piece), tuple(l.id for l in loops))


# ---------------------------------------------------------------------------
# Part builders
# ---------------------------------------------------------------------------

def _assemble(pid: str, vertices, edges, loops, faces) -> Part:
    return Part(id=pid, frame=Frame.identity(),
                vertices=tuple(vertices), edges=tuple(edges),
                loops=tuple(loops), faces=tuple(faces))


def make_box(pid: str, w: float, d: float, h: float,
             flip_up: tuple[str, ...] = ()) -> Part:
    """Axis-aligned box centered at the origin.

    Face plane normals point outward except for face names listed in
    flip_up ("zmin", ...) whose stored normal is reversed; mate frames on
    those faces then align by pure translation.
    """
    hw, hd, hh = w / 2.0, d / 2.0, h / 2.0
    corners = {}
    vertices = []
    for i, (sx, sy, sz) in enumerate([(x, y, z) for z in (-1, 1) for y in (-1, 1) for x in (-1, 1)]):
        name = f"v{i}"
        corners[(sx, sy, sz)] = name
        vertices.append(vertex_entity(name, [sx * hw, sy * hd, sz * hh]))
    pos = {n: v.summary.center_of_mass for n, v in zip([f"v{i}" for i in range(8)], vertices)}

    edge_specs = []
    # 4 bottom, 4 top, 4 vertical; endpoints by corner signs
    ring = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
    for k in range(4):
        a, b = ring[k], ring[(k + 1) % 4]
        edge_specs.append((f"e_b{k}", (*a, -1), (*b, -1)))
        edge_specs.append((f"e_t{k}", (*a, 1), (*b, 1)))
    for k in range(4):
        edge_specs.append((f"e_s{k}", (*ring[k], -1), (*ring[k], 1)))
    edges = {}
    for eid, ca, cb in edge_specs:
        va, vb = corners[ca], corners[cb]
        edges[eid] = line_entity(eid, pos[va], pos[vb], va, vb)

    face_specs = {
        "zmin": (np.array([0.0, 0.0, -hh]), -_EZ, ["e_b0", "e_b1", "e_b2", "e_b3"], (_EX, _EY, hw, hd)),
        "zmax": (np.array([0.0, 0.0, hh]), _EZ, ["e_t0", "e_t1", "e_t2", "e_t3"], (_EX, _EY, hw, hd)),
        "ymin": (np.array([0.0, -hd, 0.0]), -_EY, ["e_b0", "e_s1", "e_t0", "e_s0"], (_EX, _EZ, hw, hh)),
        "xmax": (np.array([hw, 0.0, 0.0]), _EX, ["e_b1", "e_s2", "e_t1", "e_s1"], (_EY, _EZ, hd, hh)),
        "ymax": (np.array([0.0, hd, 0.0]), _EY, ["e_b2", "e_s3", "e_t2", "e_s2"], (_EX, _EZ, hw, hh)),
        "xmin": (np.array([-hw, 0.0, 0.0]), -_EX, ["e_b3", "e_s0", "e_t3", "e_s3"], (_EY, _EZ, hd, hh)),
    }
    loops = []
    faces = []
    for name, (center, normal, eids, (u, v, half_u, half_v)) in face_specs.items():
        lp = loop_entity(f"l_{name}", "outer_loop", [edges[e] for e in eids])
        loops.append(lp)
        n = -normal if name in flip_up else normal
        piece = rect_piece(center, u, v, half_u, half_v)
        faces.append(face_entity(f"f_{name}", _fn("plane", center, normal=n), piece, [lp]))
    return _assemble(pid, vertices, edges.values(), loops, faces)


def make_plate_with_holes(pid: str, w: float, d: float, t: float,
                          holes: list[tuple[float, float, float]],
                          flip_up: tuple[str, ...] = ()) -> Part:
    """Box plate with vertical through-holes; holes = [(x, y, radius)].

    Each hole adds a cylindrical side face (axis +z) bounded by one outer
    loop holding both rim circles, and inner circular loops on the top and
    bottom plate faces.
    """
    base = make_box(pid + "_tmp", w, d, t, flip_up=flip_up)
    vertices = list(base.vertices)
    edges = list(base.edges)
    loops = [l for l in base.loops]
    faces = []
    hole_faces = []

    top_inner_loops = []
    bot_inner_loops = []
    for i, (hx, hy, r) in enumerate(holes):
        top_c = np.array([hx, hy, t / 2.0])
        bot_c = np.array([hx, hy, -t / 2.0])
        e_top = circle_entity(f"e_h{i}_top", top_c, _EZ, r)
        e_bot = circle_entity(f"e_h{i}_bot", bot_c, _EZ, r)
        edges += [e_top, e_bot]
        l_top = loop_entity(f"l_h{i}_top", "inner_loop", [e_top])
        l_bot = loop_entity(f"l_h{i}_bot", "inner_loop", [e_bot])
        l_side = loop_entity(f"l_h{i}_side", "outer_loop", [e_top, e_bot])
        loops += [l_top, l_bot, l_side]
        top_inner_loops.append(l_top)
        bot_inner_loops.append(l_bot)
        mid = np.array([hx, hy, 0.0])
        piece = cylinder_side_piece(mid, _EZ, r, t)
        hole_faces.append(face_entity(
            f"f_hole{i}", _fn("cylinder", mid, axis=_EZ, radius=r), piece, [l_side]))

    for f in base.faces:
        if f.id in ("f_zmax", "f_zmin"):
            sign = 1.0 if f.id == "f_zmax" else -1.0
            center = np.array([0.0, 0.0, sign * t / 2.0])
            inner = top_inner_loops if f.id == "f_zmax" else bot_inner_loops
            pieces = [rect_piece(center, _EX, _EY, w / 2.0, d / 2.0)]
            for (hx, hy, r) in holes:
                hole_center = np.array([hx, hy, sign * t / 2.0])
                neg = disc_piece(hole_center, _EZ, r)
                neg.measure = -neg.measure
                neg.second = -neg.second
                pieces.append(neg)
            piece = combine_pieces(pieces)
            all_loops = [next(l for l in loops if l.id == f"l_{f.id[2:]}")] + inner
            faces.append(face_entity(f.id, f.function, piece, all_loops))
        else:
            faces.append(f)
    faces += hole_faces
    return _assemble(pid, vertices, edges, loops, faces)


def make_capped_cylinder(pid: str, radius: float, length: float) -> Part:
    """Solid cylinder along +z centered at the origin: side face plus two caps."""
    top_c = np.array([0.0, 0.0, length / 2.0])
    bot_c = np.array([0.0, 0.0, -length / 2.0])
    e_top = circle_entity("e_top", top_c, _EZ, radius)
    e_bot = circle_entity("e_bot", bot_c, _EZ, radius)
    l_top = loop_entity("l_top", "outer_loop", [e_top])
    l_bot = loop_entity("l_bot", "outer_loop", [e_bot])
    l_side = loop_entity("l_side", "outer_loop", [e_top, e_bot])
    f_top = face_entity("f_top", _fn("plane", top_c, normal=_EZ),
                        disc_piece(top_c, _EZ, radius), [l_top])
    f_bot = face_entity("f_bot", _fn("plane", bot_c, normal=-_EZ),
                        disc_piece(bot_c, _EZ, radius), [l_bot])
    f_side = face_entity("f_side", _fn("cylinder", np.zeros(3), axis=_EZ, radius=radius),
                         cylinder_side_piece(np.zeros(3), _EZ, radius, length), [l_side])
    return _assemble(pid, [], [e_top, e_bot], [l_top, l_bot, l_side], [f_top, f_bot, f_side])


def make_tube(pid: str, outer_radius: float, inner_radius: float, length: float) -> Part:
    """Hollow cylinder along +z: outer side, bore side, two annular caps."""
    top = length / 2.0
    bot = -length / 2.0
    e = {
        "ot": circle_entity("e_outer_top", [0, 0, top], _EZ, outer_radius),
        "ob": circle_entity("e_outer_bot", [0, 0, bot], _EZ, outer_radius),
        "it": circle_entity("e_inner_top", [0, 0, top], _EZ, inner_radius),
        "ib": circle_entity("e_inner_bot", [0, 0, bot], _EZ, inner_radius),
    }
    l_top_outer = loop_entity("l_top_outer", "outer_loop", [e["ot"]])
    l_top_inner = loop_entity("l_top_inner", "inner_loop", [e["it"]])
    l_bot_outer = loop_entity("l_bot_outer", "outer_loop", [e["ob"]])
    l_bot_inner = loop_entity("l_bot_inner", "inner_loop", [e["ib"]])
    l_outer_side = loop_entity("l_outer_side", "outer_loop", [e["ot"], e["ob"]])
    l_bore = loop_entity("l_bore", "outer_loop", [e["it"], e["ib"]])

    def annulus(center, sign):
        outer = disc_piece(center, _EZ, outer_radius)
        inner = disc_piece(center, _EZ, inner_radius)
        inner.measure = -inner.measure
        inner.second = -inner.second
        return combine_pieces([outer, inner])

    f_top = face_entity("f_top", _fn("plane", [0, 0, top], normal=_EZ),
                        annulus(np.array([0.0, 0.0, top]), 1), [l_top_outer, l_top_inner])
    f_bot = face_entity("f_bot", _fn("plane", [0, 0, bot], normal=-_EZ),
                        annulus(np.array([0.0, 0.0, bot]), -1), [l_bot_outer, l_bot_inner])
    f_outer = face_entity("f_outer", _fn("cylinder", np.zeros(3), axis=_EZ, radius=outer_radius),
                          cylinder_side_piece(np.zeros(3), _EZ, outer_radius, length), [l_outer_side])
    f_bore = face_entity("f_bore", _fn("cylinder", np.zeros(3), axis=_EZ, radius=inner_radius),
                         cylinder_side_piece(np.zeros(3), _EZ, inner_radius, length), [l_bore])
    return _assemble(pid, [], e.values(),
                     [l_top_outer, l_top_inner, l_bot_outer, l_bot_inner, l_outer_side, l_bore],
                     [f_top, f_bot, f_outer, f_bore])


def make_capped_cone(pid: str, radius: float, height: float) -> Part:
    """Full cone, apex up at +z, base disc at z=0."""
    apex = np.array([0.0, 0.0, height])
    base_c = np.zeros(3)
    v_apex = vertex_entity("v_apex", apex)
    e_base = circle_entity("e_base", base_c, _EZ, radius)
    l_base = loop_entity("l_base", "outer_loop", [e_base])
    l_side = loop_entity("l_side", "outer_loop", [e_base])
    half_angle = math.atan2(radius, height)
    f_base = face_entity("f_base", _fn("plane", base_c, normal=-_EZ),
                         disc_piece(base_c, _EZ, radius), [l_base])
    f_side = face_entity("f_side", _fn("cone", apex, axis=_EZ, half_angle=half_angle),
                         cone_side_piece(apex, _EZ, radius, height), [l_side])
    return _assemble(pid, [v_apex], [e_base], [l_base, l_side], [f_base, f_side])


def make_donut(pid: str, major: float, minor: float) -> Part:
    """Full torus about +z with a seam loop at the outer equator."""
    seam_c = np.zeros(3)
    e_seam = circle_entity("e_seam", seam_c, _EZ, major + minor)
    l_seam = loop_entity("l_seam", "outer_loop", [e_seam])
    f = face_entity("f_torus", _fn("torus", seam_c, axis=_EZ, major_radius=major, minor_radius=minor),
                    torus_piece(seam_c, _EZ, major, minor), [l_seam])
    return _assemble(pid, [], [e_seam], [l_seam], [f])


def part_moments(part: Part) -> PieceMoments:
    """Area-weighted composition of all face summaries (fingerprint basis)."""
    return combine_pieces([piece_from_summary(f.summary) for f in part.faces])
