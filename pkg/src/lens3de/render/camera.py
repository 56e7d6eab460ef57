"""Perspective camera: world -> camera -> screen transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Camera:
    position: np.ndarray
    look_at: np.ndarray
    up: np.ndarray
    vfov_deg: float
    near: float
    far: float
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64))
        object.__setattr__(self, "look_at", np.asarray(self.look_at, dtype=np.float64))
        object.__setattr__(self, "up", np.asarray(self.up, dtype=np.float64))
        if not (0.0 < self.vfov_deg < 180.0):
            raise ValueError("vertical FOV must be in (0, 180) degrees")
        if not (self.near > 0.0 and self.far > self.near):
            raise ValueError("need 0 < near < far")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport must be positive")

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Right, up, forward unit vectors (forward toward look_at)."""
        forward = self.look_at - self.position
        f = forward / np.linalg.norm(forward)
        right = np.cross(f, self.up)
        rn = np.linalg.norm(right)
        if rn < 1e-12:
            raise ValueError("camera up is parallel to the view direction")
        right = right / rn
        up = np.cross(right, f)
        return right, up, f

    @property
    def focal(self) -> float:
        return 1.0 / math.tan(math.radians(self.vfov_deg) / 2.0)

    @property
    def aspect(self) -> float:
        return self.width / self.height

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        """Camera coordinates: x right, y up, z forward (positive in front)."""
        right, up, f = self.basis()
        d = np.asarray(points, dtype=np.float64) - self.position
        return d @ np.stack([right, up, f], axis=1)

    def camera_to_screen(self, pc: np.ndarray) -> np.ndarray:
        """Project camera-space points (z > 0) to pixel coordinates.

        Pixel centers sit at integer + 0.5; y grows downward.
        """
        pc = np.asarray(pc, dtype=np.float64)
        z = pc[..., 2]
        x_ndc = pc[..., 0] / z * self.focal / self.aspect
        y_ndc = pc[..., 1] / z * self.focal
        sx = (x_ndc * 0.5 + 0.5) * self.width
        sy = (0.5 - y_ndc * 0.5) * self.height
        return np.stack([sx, sy], axis=-1)

    def project(self, points: np.ndarray) -> np.ndarray:
        return self.camera_to_screen(self.world_to_camera(points))
