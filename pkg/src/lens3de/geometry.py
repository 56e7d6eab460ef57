"""Lens model and object-space geometry.

All quantities are float64. Points and directions are numpy arrays of shape
(3,); batched helpers take (N, 3) arrays. The object-space patch computed
here doubles as the validation oracle for the screen-space decal pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Vec3 = np.ndarray  # shape (3,), float64


def vec3(x: float, y: float, z: float) -> Vec3:
    return np.array([x, y, z], dtype=np.float64)


def normalize(v: np.ndarray) -> np.ndarray:
    """Unit vector along *v*; raises on (near-)zero input."""
    n = float(np.linalg.norm(v))
    if n < 1e-12:
        raise ValueError("cannot normalize near-zero vector")
    return np.asarray(v, dtype=np.float64) / n


def _check_unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be a finite 3-vector")
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-9:
        raise ValueError(f"{name} must be unit length")
    return v


@dataclass(frozen=True)
class Ball:
    """Spherical lens region: center c, radius r > 0."""

    center: Vec3
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise ValueError("ball center must be a finite 3-vector")
        object.__setattr__(self, "center", c)
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError("ball radius must be finite and > 0")


@dataclass(frozen=True)
class Disk:
    """Orientation disk inside a ball; shares the ball's center and radius."""

    center: Vec3
    radius: float
    normal: Vec3

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        object.__setattr__(self, "normal", _check_unit(self.normal, "disk normal"))


@dataclass(frozen=True)
class Lens3De:
    """The single manipulable lens entity: ball + optional orientation disk.

    ``disk_normal`` unset means pure containment selection; setting it
    enables the angular filter with ``angular_tolerance_deg``.
    """

    ball: Ball
    disk_normal: Vec3 | None = None
    angular_tolerance_deg: float = 15.0

    def __post_init__(self):
        if self.disk_normal is not None:
            object.__setattr__(
                self, "disk_normal", _check_unit(self.disk_normal, "disk normal")
            )
        if not (0.0 < self.angular_tolerance_deg <= 90.0):
            raise ValueError("angular tolerance must be in (0, 90] degrees")


@dataclass(frozen=True)
class PatchSelection:
    """Surface patch of a ball: per-triangle classification + vertex mask.

    ``full_triangle_ids``: all 3 vertices inside the ball.
    ``partial_triangle_ids``: 1 or 2 vertices inside.
    ``vertex_mask``: true exactly for vertices inside the ball.
    """

    full_triangle_ids: np.ndarray
    partial_triangle_ids: np.ndarray
    vertex_mask: np.ndarray = field(repr=False)


def point_in_ball(p: Vec3, ball: Ball) -> bool:
    """Boundary-inclusive containment test: |p - c| <= r."""
    d = np.asarray(p, dtype=np.float64) - ball.center
    return bool(d @ d <= ball.radius * ball.radius)


def points_in_ball(points: np.ndarray, ball: Ball) -> np.ndarray:
    """Vectorized point_in_ball over an (N, 3) array."""
    d = np.asarray(points, dtype=np.float64) - ball.center
    return np.einsum("ij,ij->i", d, d) <= ball.radius * ball.radius


def segment_intersects_ball(a: Vec3, b: Vec3, ball: Ball) -> bool:
    """True iff the closed segment [a, b] comes within r of the ball center.

    Closest-point parameter clamped to [0, 1]; exact, no sampling.
    """
    a = np.asarray(a, dtype=np.float64)
    d = np.asarray(b, dtype=np.float64) - a
    ac = ball.center - a
    dd = float(d @ d)
    t = 0.0 if dd < 1e-30 else min(1.0, max(0.0, float(ac @ d) / dd))
    closest = a + t * d - ball.center
    return bool(closest @ closest <= ball.radius * ball.radius)


def segments_intersect_ball(a: np.ndarray, b: np.ndarray, ball: Ball) -> np.ndarray:
    """Vectorized segment test over (N, 3) endpoint arrays."""
    a = np.asarray(a, dtype=np.float64)
    d = np.asarray(b, dtype=np.float64) - a
    ac = ball.center - a
    dd = np.einsum("ij,ij->i", d, d)
    t = np.where(dd < 1e-30, 0.0, np.einsum("ij,ij->i", ac, d) / np.maximum(dd, 1e-30))
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, None] * d - ball.center
    return np.einsum("ij,ij->i", closest, closest) <= ball.radius * ball.radius


def ball_surface_patch(vertices: np.ndarray, triangles: np.ndarray, ball: Ball) -> PatchSelection:
    """Classify mesh triangles against the ball by vertex containment.

    A triangle is full iff all 3 vertices are inside, partial iff 1 or 2
    are. Partial triangles are not clipped in object space; the screen-space
    decal pass clips per pixel.
    """
    vertices = np.asarray(vertices, dtype=np.float64)
    triangles = np.asarray(triangles, dtype=np.int64)
    mask = points_in_ball(vertices, ball)
    if triangles.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return PatchSelection(empty, empty, mask)
    inside_count = mask[triangles].sum(axis=1)
    full = np.nonzero(inside_count == 3)[0]
    partial = np.nonzero((inside_count > 0) & (inside_count < 3))[0]
    return PatchSelection(full, partial, mask)


def spherical_cap_radius(r: float, d: float) -> float:
    """Radius of the circle cut by a plane at distance d from a sphere center.

    Test oracle for planar patches: sqrt(r^2 - d^2) for d < r, else 0.
    """
    if r < 0 or d < 0:
        raise ValueError("radius and distance must be non-negative")
    if d >= r:
        return 0.0
    return float(np.sqrt(r * r - d * d))


def disk_from_lens(lens: Lens3De) -> Disk | None:
    """Orientation disk of the lens, or None when no disk normal is set."""
    if lens.disk_normal is None:
        return None
    return Disk(lens.ball.center, lens.ball.radius, lens.disk_normal)
