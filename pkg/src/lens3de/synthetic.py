"""Deterministic synthetic scenes: a tube-like surface plus a streamline bundle.

The generator is pure in (parameters, seed). Triangle count tracks the
request within 1%; line count is exact. Lines with even seed ids run
straight along the tube axis (+x); odd ids are straight lines tilted at
least 20 degrees off the axis (angle drawn per line). That labeling is
relied on by angular-filter tests: with the disk normal on +x and any
tolerance of 15 degrees or less, exactly the even-id lines qualify, and
tightening the tolerance from 90 degrees down sheds odd lines gradually.
"""

from __future__ import annotations

import numpy as np

from .scene import StreamlineSet, SurfaceMesh

TUBE_LENGTH = 4.0
TUBE_BASE_RADIUS = 0.8
TUBE_RADIUS_WOBBLE = 0.15


def _tube_radius(x: np.ndarray) -> np.ndarray:
    return TUBE_BASE_RADIUS + TUBE_RADIUS_WOBBLE * np.sin(2.0 * np.pi * 1.5 * x / TUBE_LENGTH)


def generate_tube_mesh(triangles: int) -> SurfaceMesh:
    """Open-ended tube along +x with a sinusoidal radius profile.

    Grid of rings x segments; actual triangle count 2*(rings-1)*segments,
    within 1% of the request.
    """
    if triangles <= 0:
        raise ValueError("triangle count must be positive")
    segments = max(8, int(round(np.sqrt(triangles / 2.0))))
    rings = max(2, int(round(triangles / (2.0 * segments))) + 1)
    xs = np.linspace(0.0, TUBE_LENGTH, rings)
    theta = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    r = _tube_radius(xs)
    X = np.repeat(xs, segments)
    T = np.tile(theta, rings)
    R = np.repeat(r, segments)
    vertices = np.stack([X, R * np.cos(T), R * np.sin(T)], axis=1)

    ring = np.arange(rings - 1)[:, None]
    seg = np.arange(segments)[None, :]
    a = ring * segments + seg
    b = ring * segments + (seg + 1) % segments
    c = (ring + 1) * segments + seg
    d = (ring + 1) * segments + (seg + 1) % segments
    tris = np.concatenate(
        [
            np.stack([a, b, d], axis=2).reshape(-1, 3),
            np.stack([a, d, c], axis=2).reshape(-1, 3),
        ]
    )

    # Analytic-flavored attributes: curvature follows the radius profile,
    # pressure falls off along the axis.
    curvature = 1.0 / _tube_radius(X) + 0.2 * np.cos(2.0 * T)
    pressure = 1.0 - X / TUBE_LENGTH + 0.1 * np.sin(3.0 * T)
    return SurfaceMesh(
        vertices,
        tris,
        attribute_layers={"curvature": curvature, "pressure": pressure},
    )


def generate_flow_lines(lines: int, seed: int, points_per_line: int = 24) -> StreamlineSet:
    """Streamline bundle inside the tube; see module docstring for labeling."""
    if lines <= 0:
        raise ValueError("line count must be positive")
    rng = np.random.default_rng(seed)
    polylines = []
    speeds = []
    vorticity = []
    for i in range(lines):
        rho = 0.6 * TUBE_BASE_RADIUS * np.sqrt(rng.random())
        phi = 2.0 * np.pi * rng.random()
        y0 = rho * np.cos(phi)
        z0 = rho * np.sin(phi)
        if i % 2 == 0:
            x = np.linspace(0.1, TUBE_LENGTH - 0.1, points_per_line)
            pts = np.stack([x, np.full_like(x, y0), np.full_like(x, z0)], axis=1)
        else:
            x0 = 0.1 + (TUBE_LENGTH - 0.2) * rng.random()
            alpha = np.deg2rad(20.0 + 70.0 * rng.random())
            across = np.array([0.0, -np.sin(phi), np.cos(phi)])
            direction = np.cos(alpha) * np.array([1.0, 0.0, 0.0]) + np.sin(alpha) * across
            half = 0.45 * TUBE_BASE_RADIUS
            t = np.linspace(-half, half, points_per_line)
            pts = np.array([x0, y0, z0]) + t[:, None] * direction
        polylines.append(pts)
        profile = 1.0 - (rho / TUBE_BASE_RADIUS) ** 2
        speeds.append(np.full(points_per_line, profile) + 0.05 * np.sin(np.arange(points_per_line)))
        vorticity.append(np.full(points_per_line, rho))
    return StreamlineSet.from_lines(
        polylines,
        attribute_layers={
            "speed": np.concatenate(speeds),
            "vorticity": np.concatenate(vorticity),
        },
    )


def generate_synthetic_scene(
    triangles: int, lines: int, seed: int = 0
) -> tuple[SurfaceMesh, StreamlineSet]:
    """Deterministic tube scene at the requested triangle/line counts."""
    return generate_tube_mesh(triangles), generate_flow_lines(lines, seed)
