"""Triangulation of the generator surface repertoire for mesh previews.

Supported: planar faces trimmed by polygons and/or circles, full
cylinders, full cones, and full tori. Parametrically complex kinds
(bsurf, swept, spun, blend) are rejected.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import Delaunay

from ..errors import DegenerateGeometryError, UnsupportedSurfaceError
from ..geometry import normalized
from .model import Entity, Part, TriangleMesh

_TESSELLATABLE = {"plane", "cylinder", "cone", "torus"}


def _plane_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pick = np.array([1.0, 0, 0]) if abs(n[0]) < 0.9 else np.array([0, 1.0, 0])
    u = normalized(np.cross(n, pick))
    return u, np.cross(n, u)


def _circle_points(center, normal, radius, res) -> np.ndarray:
    u, v = _plane_basis(np.asarray(normal, dtype=float))
    theta = np.linspace(0.0, 2.0 * math.pi, res, endpoint=False)
    return center + radius * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v))


def _polygon_from_loop(part: Part, loop: Entity) -> list[np.ndarray]:
    """Chain the loop's line edges into an ordered corner list."""
    segs = []
    for e in part.edges_of_loop(loop.id):
        va = part.entity(e.refs[0]).function.param("position")
        vb = part.entity(e.refs[1]).function.param("position")
        segs.append((va, vb))
    corners = [segs[0][0], segs[0][1]]
    remaining = segs[1:]
    while remaining:
        tail = corners[-1]
        for i, (a, b) in enumerate(remaining):
            if np.allclose(a, tail, atol=1e-9):
                corners.append(b)
                remaining.pop(i)
                break
            if np.allclose(b, tail, atol=1e-9):
                corners.append(a)
                remaining.pop(i)
                break
        else:
            raise DegenerateGeometryError(f"loop {loop.id!r} edges do not chain into a cycle")
    return corners[:-1]  # closing corner repeats the first


def _point_in_polygon(pt, poly) -> bool:
    # even-odd rule in 2D
    x, y = pt
    inside = False
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            t = (y - y0) / (y1 - y0)
            if x < x0 + t * (x1 - x0):
                inside = not inside
    return inside


def _loop_kind(part: Part, loop: Entity) -> str:
    kinds = {part.entity(r).function.kind for r in loop.refs}
    if kinds == {"line"}:
        return "polygon"
    if kinds == {"circle"} and len(loop.refs) == 1:
        return "circle"
    raise UnsupportedSurfaceError(
        f"loop {loop.id!r} mixes edge kinds {sorted(kinds)}; cannot trim a planar face")


def _tessellate_plane(part: Part, face: Entity, res: int):
    n = normalized(np.asarray(face.function.param("normal"), dtype=float))
    origin = face.function.origin
    u, v = _plane_basis(n)

    outer = None
    holes = []
    for loop in part.loops_of_face(face.id):
        kind = _loop_kind(part, loop)
        if loop.function.kind == "outer_loop":
            outer = (kind, loop)
        else:
            if kind != "circle":
                raise UnsupportedSurfaceError(
                    f"face {face.id!r}: only circular inner loops are supported")
            holes.append(loop)

    if outer is None:
        raise UnsupportedSurfaceError(f"face {face.id!r} has no outer loop")

    pts3 = []
    outer_kind, outer_loop = outer
    if outer_kind == "polygon":
        poly3 = _polygon_from_loop(part, outer_loop)
        pts3.extend(poly3)
        outer_poly2 = [((p - origin) @ u, (p - origin) @ v) for p in poly3]
        outer_circle = None
    else:
        edge = part.entity(outer_loop.refs[0])
        c = edge.function.origin
        r = float(edge.function.param("radius"))
        pts3.extend(_circle_points(c, n, r, max(res, 3)))
        outer_poly2 = None
        outer_circle = (((c - origin) @ u, (c - origin) @ v), r)

    hole_discs = []
    for loop in holes:
        edge = part.entity(loop.refs[0])
        c = edge.function.origin
        r = float(edge.function.param("radius"))
        pts3.extend(_circle_points(c, n, r, max(res, 3)))
        hole_discs.append((((c - origin) @ u, (c - origin) @ v), r))

    pts3 = np.asarray(pts3, dtype=float)
    pts2 = np.column_stack([(pts3 - origin) @ u, (pts3 - origin) @ v])
    tri = Delaunay(pts2)

    keep = []
    for simplex in tri.simplices:
        cen = pts2[simplex].mean(axis=0)
        if outer_poly2 is not None and not _point_in_polygon(cen, outer_poly2):
            continue
        if outer_circle is not None:
            (cx, cy), r = outer_circle
            if (cen[0] - cx) ** 2 + (cen[1] - cy) ** 2 > r * r:
                continue
        if any((cen[0] - cx) ** 2 + (cen[1] - cy) ** 2 < r * r for (cx, cy), r in hole_discs):
            continue
        keep.append(simplex)

    tris = np.asarray(keep, dtype=int)
    # orient windings with the stored normal
    for t in tris:
        a, b, c = pts3[t]
        if np.dot(np.cross(b - a, c - a), n) < 0:
            t[1], t[2] = t[2], t[1]
    return pts3, tris


def _face_circles(part: Part, face: Entity):
    circles = []
    for loop in part.loops_of_face(face.id):
        for eid in loop.refs:
            e = part.entity(eid)
            if e.function.kind == "circle":
                circles.append(e)
    return circles


def _ring_mesh(rings: list[np.ndarray]):
    """Connect consecutive rings of equal point count into quad strips."""
    res = len(rings[0])
    positions = np.vstack(rings)
    tris = []
    for k in range(len(rings) - 1):
        lo = k * res
        hi = (k + 1) * res
        for i in range(res):
            j = (i + 1) % res
            tris.append([lo + i, hi + i, hi + j])
            tris.append([lo + i, hi + j, lo + j])
    return positions, np.asarray(tris, dtype=int)


def _tessellate_cylinder(part: Part, face: Entity, res: int):
    axis = normalized(np.asarray(face.function.param("axis"), dtype=float))
    r = float(face.function.param("radius"))
    circles = _face_circles(part, face)
    if len(circles) != 2:
        raise UnsupportedSurfaceError(
            f"face {face.id!r}: cylinder tessellation needs two bounding circles")
    circles.sort(key=lambda e: float(e.function.origin @ axis))
    rings = [_circle_points(c.function.origin, axis, r, res) for c in circles]
    return _ring_mesh(rings)


def _tessellate_cone(part: Part, face: Entity, res: int):
    axis = normalized(np.asarray(face.function.param("axis"), dtype=float))
    apex = face.function.origin
    half_angle = float(face.function.param("half_angle"))
    circles = _face_circles(part, face)
    if len(circles) == 2:
        circles.sort(key=lambda e: float(e.function.origin @ axis))
        rings = []
        for c in circles:
            rc = float(c.function.param("radius"))
            rings.append(_circle_points(c.function.origin, axis, rc, res))
        return _ring_mesh(rings)
    if len(circles) == 1:
        c = circles[0]
        ring = _circle_points(c.function.origin, axis, float(c.function.param("radius")), res)
        positions = np.vstack([ring, apex[None, :]])
        apex_i = len(ring)
        tris = []
        for i in range(res):
            j = (i + 1) % res
            tris.append([i, j, apex_i])
        return positions, np.asarray(tris, dtype=int)
    raise UnsupportedSurfaceError(f"face {face.id!r}: cone tessellation needs 1 or 2 circles")


def _tessellate_torus(face: Entity, res: int):
    axis = normalized(np.asarray(face.function.param("axis"), dtype=float))
    center = face.function.origin
    major = float(face.function.param("major_radius"))
    minor = float(face.function.param("minor_radius"))
    u, v = _plane_basis(axis)
    theta = np.linspace(0.0, 2.0 * math.pi, res, endpoint=False)
    phi = np.linspace(0.0, 2.0 * math.pi, res, endpoint=False)
    positions = []
    for p in phi:
        ring_r = major + minor * math.cos(p)
        z = minor * math.sin(p)
        ring = center + ring_r * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v)) + z * axis
        positions.append(ring)
    positions = np.vstack(positions)
    tris = []
    for k in range(res):
        lo = k * res
        hi = ((k + 1) % res) * res
        for i in range(res):
            j = (i + 1) % res
            tris.append([lo + i, hi + i, hi + j])
            tris.append([lo + i, hi + j, lo + j])
    return positions, np.asarray(tris, dtype=int)


def tessellate(part: Part, angular_resolution: int = 32) -> TriangleMesh:
    """Triangulate every face; curved surfaces get angular_resolution
    segments per full revolution; each triangle is tagged with its face id.
    """
    if angular_resolution < 3:
        raise DegenerateGeometryError("angular_resolution must be at least 3")
    all_pos = []
    all_tris = []
    face_tags = []
    offset = 0
    for face in part.faces:
        kind = face.function.kind
        if kind not in _TESSELLATABLE:
            raise UnsupportedSurfaceError(
                f"face {face.id!r}: cannot tessellate surface kind {kind!r}")
        if kind == "plane":
            pos, tris = _tessellate_plane(part, face, angular_resolution)
        elif kind == "cylinder":
            pos, tris = _tessellate_cylinder(part, face, angular_resolution)
        elif kind == "cone":
            pos, tris = _tessellate_cone(part, face, angular_resolution)
        else:
            pos, tris = _tessellate_torus(face, angular_resolution)
        all_pos.append(pos)
        all_tris.append(tris + offset)
        face_tags.extend([face.id] * len(tris))
        offset += len(pos)
    mesh = TriangleMesh(
        positions=np.vstack(all_pos) if all_pos else np.zeros((0, 3)),
        triangles=np.vstack(all_tris) if all_tris else np.zeros((0, 3), dtype=int),
        face_of_triangle=tuple(face_tags),
    )
    mesh.validate()
    return mesh
