"""Quadrature and Monte-Carlo oracles for the analytic summary math."""

import numpy as np
import pytest

from brepmate.forge import make_plate_with_holes
from brepmate.forge.shapes import (
    circle_piece,
    combine_pieces,
    cone_side_piece,
    cylinder_side_piece,
    disc_piece,
    rect_piece,
    segment_piece,
    torus_piece,
)

RNG = np.random.default_rng(424242)


def numeric_moments(points: np.ndarray, weights: np.ndarray):
    """Measure, centroid, and centered second moments of a weighted point set."""
    m = weights.sum()
    com = (weights[:, None] * points).sum(axis=0) / m
    centered = points - com
    second = (weights[:, None, None] * centered[:, :, None] * centered[:, None, :]).sum(axis=0)
    return m, com, second


def assert_piece_matches(piece, m, com, second, tol=1e-7):
    scale = max(1.0, abs(m))
    assert abs(piece.measure - m) < tol * scale
    assert np.allclose(piece.com, com, atol=tol * scale)
    assert np.allclose(piece.second, second, atol=tol * max(1.0, float(np.abs(second).max())))


def test_rect_moments_match_gauss_quadrature():
    center = np.array([0.3, -0.2, 0.7])
    u = np.array([1.0, 0, 0])
    v = np.array([0, 0, 1.0])
    a, b = 0.6, 0.25
    xs, wx = np.polynomial.legendre.leggauss(8)
    pts, ws = [], []
    for xi, wi in zip(xs, wx):
        for yj, wj in zip(xs, wx):
            pts.append(center + a * xi * u + b * yj * v)
            ws.append(wi * wj * a * b)
    m, com, second = numeric_moments(np.asarray(pts), np.asarray(ws))
    assert_piece_matches(rect_piece(center, u, v, a, b), m, com, second)


def _polar_quadrature(center, u, v, radius, n_r=24, n_t=256):
    rs, wr = np.polynomial.legendre.leggauss(n_r)
    rs = (rs + 1.0) / 2.0 * radius
    wr = wr * radius / 2.0
    ts = np.linspace(0.0, 2 * np.pi, n_t, endpoint=False)
    wt = 2 * np.pi / n_t
    pts, ws = [], []
    for r, w in zip(rs, wr):
        for t in ts:
            pts.append(center + r * np.cos(t) * u + r * np.sin(t) * v)
            ws.append(w * wt * r)
    return np.asarray(pts), np.asarray(ws)


def test_disc_moments_match_polar_quadrature():
    center = np.array([0.1, 0.4, -0.3])
    n = np.array([0.0, 0.0, 1.0])
    pts, ws = _polar_quadrature(center, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), 0.45)
    m, com, second = numeric_moments(pts, ws)
    assert_piece_matches(disc_piece(center, n, 0.45), m, com, second)


def test_circle_curve_moments():
    center = np.array([0.2, 0.0, 0.9])
    r = 0.35
    ts = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
    pts = center + r * np.column_stack([np.cos(ts), np.sin(ts), np.zeros_like(ts)])
    ws = np.full_like(ts, 2 * np.pi * r / ts.size)
    m, com, second = numeric_moments(pts, ws)
    assert_piece_matches(circle_piece(center, np.array([0.0, 0, 1.0]), r), m, com, second, tol=1e-6)


def test_segment_moments():
    p0 = np.array([0.1, 0.2, 0.3])
    p1 = np.array([0.9, -0.4, 0.5])
    ts = np.linspace(0.0, 1.0, 8192)
    pts = p0 + ts[:, None] * (p1 - p0)
    length = np.linalg.norm(p1 - p0)
    ws = np.full(ts.size, length / ts.size)
    m, com, second = numeric_moments(pts, ws)
    assert_piece_matches(segment_piece(p0, p1), m, com, second, tol=1e-4)


def test_cylinder_side_moments():
    center = np.array([0.0, 0.1, 0.2])
    r, length = 0.3, 0.8
    ts = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
    zs = np.linspace(-length / 2, length / 2, 257)
    pts, ws = [], []
    dz = length / (zs.size - 1)
    for i, z in enumerate(zs):
        wz = dz * (0.5 if i in (0, zs.size - 1) else 1.0)  # trapezoid
        ring = center + np.column_stack([r * np.cos(ts), r * np.sin(ts), np.full_like(ts, z)])
        pts.append(ring)
        ws.append(np.full(ts.size, wz * (2 * np.pi * r / ts.size)))
    m, com, second = numeric_moments(np.vstack(pts), np.concatenate(ws))
    assert_piece_matches(cylinder_side_piece(center, np.array([0.0, 0, 1.0]), r, length),
                         m, com, second, tol=1e-4)


def test_cone_side_moments():
    apex = np.array([0.0, 0.0, 0.9])
    r, h = 0.4, 0.9
    slant = np.sqrt(1.0 + (r / h) ** 2)
    ts = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
    zs, wz = np.polynomial.legendre.leggauss(64)
    zs = (zs + 1.0) / 2.0 * h          # distance below apex
    wz = wz * h / 2.0
    pts, ws = [], []
    for z, w in zip(zs, wz):
        rho = r * z / h
        ring = np.column_stack([rho * np.cos(ts), rho * np.sin(ts), np.full_like(ts, apex[2] - z)])
        pts.append(ring)
        ws.append(np.full(ts.size, w * slant * (2 * np.pi * rho / ts.size)))
    m, com, second = numeric_moments(np.vstack(pts), np.concatenate(ws))
    assert_piece_matches(cone_side_piece(apex, np.array([0.0, 0, 1.0]), r, h), m, com, second, tol=1e-5)


def test_torus_moments():
    center = np.array([0.1, -0.1, 0.4])
    R, r = 0.5, 0.12
    ts = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
    ps = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
    pts, ws = [], []
    for p in ps:
        ring_r = R + r * np.cos(p)
        z = r * np.sin(p)
        ring = center + np.column_stack([ring_r * np.cos(ts), ring_r * np.sin(ts), np.full_like(ts, z)])
        pts.append(ring)
        ws.append(np.full(ts.size, ring_r * r * (2 * np.pi / ts.size) * (2 * np.pi / ps.size)))
    m, com, second = numeric_moments(np.vstack(pts), np.concatenate(ws))
    assert_piece_matches(torus_piece(center, np.array([0.0, 0, 1.0]), R, r), m, com, second, tol=1e-5)


def test_plate_top_face_composite_vs_monte_carlo():
    holes = [(0.25, 0.05, 0.1), (-0.2, -0.1, 0.08)]
    plate = make_plate_with_holes("mc_plate", 1.0, 0.8, 0.2, holes)
    top = plate.entity("f_zmax")
    rng = np.random.default_rng(5)
    n = 2_000_000
    xy = rng.uniform([-0.5, -0.4], [0.5, 0.4], size=(n, 2))
    inside = np.ones(n, dtype=bool)
    for hx, hy, r in holes:
        inside &= (xy[:, 0] - hx) ** 2 + (xy[:, 1] - hy) ** 2 > r * r
    area_domain = 1.0 * 0.8
    pts = np.column_stack([xy[inside], np.full(inside.sum(), 0.1)])
    ws = np.full(len(pts), area_domain / n)
    m, com, second = numeric_moments(pts, ws)
    s = top.summary
    assert abs(s.size - m) < 3e-3
    assert np.allclose(s.center_of_mass, com, atol=2e-3)
    inertia = np.trace(second) * np.eye(3) - second
    stored = s.inertia_tensor()
    assert np.allclose(stored, inertia, atol=3e-3)


def test_loop_summary_matches_sampled_boundary(plate2):
    # hole side loop: two rim circles
    loop = plate2.entity("l_h0_side")
    edges = [plate2.entity(r) for r in loop.refs]
    pts, ws = [], []
    for e in edges:
        c = e.function.origin
        r = float(e.function.param("radius"))
        ts = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        pts.append(c + r * np.column_stack([np.cos(ts), np.sin(ts), np.zeros_like(ts)]))
        ws.append(np.full(ts.size, 2 * np.pi * r / ts.size))
    m, com, second = numeric_moments(np.vstack(pts), np.concatenate(ws))
    assert abs(loop.summary.size - m) < 1e-6
    assert np.allclose(loop.summary.center_of_mass, com, atol=1e-6)
    inertia = np.trace(second) * np.eye(3) - second
    assert np.allclose(loop.summary.inertia_tensor(), inertia, atol=1e-5)


def test_composite_with_negative_pieces_is_signed():
    outer = disc_piece(np.zeros(3), np.array([0.0, 0, 1.0]), 0.5)
    inner = disc_piece(np.zeros(3), np.array([0.0, 0, 1.0]), 0.3)
    inner.measure = -inner.measure
    inner.second = -inner.second
    ring = combine_pieces([outer, inner])
    assert np.isclose(ring.measure, np.pi * (0.5**2 - 0.3**2))
