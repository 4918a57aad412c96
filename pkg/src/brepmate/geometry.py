"""Rigid frames and small vector helpers used throughout the package."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrameError

UNIT_TOL = 1e-9


def vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


def is_unit(v: np.ndarray, tol: float = UNIT_TOL) -> bool:
    return abs(float(np.linalg.norm(v)) - 1.0) <= tol


def normalized(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n < 1e-15:
        raise DegenerateFrameError("cannot normalize a zero-length vector")
    return v / n


@dataclass(frozen=True)
class Frame:
    """Rigid coordinate frame: origin plus orthonormal right-handed x/y/z axes."""

    origin: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @staticmethod
    def identity() -> "Frame":
        return Frame(np.zeros(3), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))

    def rotation(self) -> np.ndarray:
        """3x3 matrix with x, y, z as columns."""
        return np.column_stack([self.x, self.y, self.z])

    def matrix(self) -> np.ndarray:
        """Homogeneous 4x4 matrix mapping frame coordinates to world."""
        m = np.eye(4)
        m[:3, :3] = self.rotation()
        m[:3, 3] = self.origin
        return m

    def is_orthonormal(self, tol: float = UNIT_TOL) -> bool:
        r = self.rotation()
        return bool(
            np.allclose(r.T @ r, np.eye(3), atol=tol)
            and np.linalg.det(r) > 0
        )


def frame_from_z(origin: np.ndarray, z: np.ndarray, part_x: np.ndarray, part_y: np.ndarray,
                 parallel_tol: float = 1e-9) -> Frame:
    """Complete a frame from a z-axis.

    y is the cross product of z with the part frame's x-axis; when z is
    parallel to that x-axis (within parallel_tol of unit dot product) the
    part frame's y-axis is used instead. x closes the right-handed triad.
    """
    z = normalized(np.asarray(z, dtype=float))
    if abs(float(np.dot(z, part_x))) > 1.0 - parallel_tol:
        y = np.cross(z, part_y)
    else:
        y = np.cross(z, part_x)
    y = normalized(y)
    x = np.cross(y, z)
    return Frame(np.asarray(origin, dtype=float), x, y, z)


def align_transform(frame_a: Frame, frame_b: Frame) -> np.ndarray:
    """4x4 transform T with T @ frame_b.matrix() == frame_a.matrix().

    Applying T to geometry expressed alongside frame_b carries it onto
    frame_a, which is how a mate location places the second part.
    """
    mb = frame_b.matrix()
    inv = np.eye(4)
    r = mb[:3, :3]
    inv[:3, :3] = r.T
    inv[:3, 3] = -r.T @ mb[:3, 3]
    return frame_a.matrix() @ inv


def rotation_angle_between(frame_a: Frame, frame_b: Frame) -> float:
    """Geodesic angle in radians between the two frame orientations."""
    r = frame_a.rotation().T @ frame_b.rotation()
    c = (float(np.trace(r)) - 1.0) / 2.0
    return float(np.arccos(min(1.0, max(-1.0, c))))


def frames_equivalent(frame_a: Frame, frame_b: Frame, tol_pos: float, tol_ang: float) -> bool:
    """True when origins and orientations agree within the given tolerances."""
    if float(np.linalg.norm(frame_a.origin - frame_b.origin)) > tol_pos:
        return False
    return rotation_angle_between(frame_a, frame_b) <= tol_ang


def apply_transform(t: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Apply a 4x4 homogeneous transform to an (N, 3) point array."""
    pts = np.asarray(points, dtype=float)
    return pts @ t[:3, :3].T + t[:3, 3]
