"""Timed lens keyframe scripts for deterministic scripted animation.

JSON: ``{"keyframes": [{"time": s, "center": [x,y,z], "radius": r,
"disk_normal": [x,y,z] | null, "tol_deg": t}, ...]}`` with strictly
increasing times. Lens parameters interpolate linearly between keyframes;
disk normals are re-normalized after interpolation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Ball, Lens3De


@dataclass(frozen=True)
class LensKeyframe:
    time: float
    center: np.ndarray
    radius: float
    disk_normal: np.ndarray | None
    tol_deg: float


@dataclass(frozen=True)
class LensScript:
    keyframes: tuple[LensKeyframe, ...]

    def __post_init__(self):
        if not self.keyframes:
            raise ValueError("script needs at least one keyframe")
        times = [k.time for k in self.keyframes]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")
        if any(k.radius <= 0 for k in self.keyframes):
            raise ValueError("keyframe radii must be positive")

    @property
    def duration(self) -> float:
        return self.keyframes[-1].time - self.keyframes[0].time

    def lens_at(self, t: float) -> Lens3De:
        """Lens state at time *t*, clamped to the script's time range."""
        kfs = self.keyframes
        if t <= kfs[0].time:
            return _to_lens(kfs[0])
        if t >= kfs[-1].time:
            return _to_lens(kfs[-1])
        for a, b in zip(kfs, kfs[1:]):
            if t <= b.time:
                u = (t - a.time) / (b.time - a.time)
                center = a.center + u * (b.center - a.center)
                radius = a.radius + u * (b.radius - a.radius)
                tol = a.tol_deg + u * (b.tol_deg - a.tol_deg)
                if a.disk_normal is None or b.disk_normal is None:
                    normal = b.disk_normal if u >= 1.0 else a.disk_normal
                else:
                    n = a.disk_normal + u * (b.disk_normal - a.disk_normal)
                    ln = np.linalg.norm(n)
                    normal = a.disk_normal if ln < 1e-9 else n / ln
                return Lens3De(Ball(center, radius), normal, tol)
        raise AssertionError("unreachable")


def _to_lens(k: LensKeyframe) -> Lens3De:
    return Lens3De(Ball(k.center, k.radius), k.disk_normal, k.tol_deg)


def load_script(path: str | Path) -> LensScript:
    with open(path) as fh:
        doc = json.load(fh)
    kfs = []
    for rec in doc["keyframes"]:
        normal = rec.get("disk_normal")
        if normal is not None:
            normal = np.asarray(normal, dtype=np.float64)
            normal = normal / np.linalg.norm(normal)
        kfs.append(
            LensKeyframe(
                time=float(rec["time"]),
                center=np.asarray(rec["center"], dtype=np.float64),
                radius=float(rec["radius"]),
                disk_normal=normal,
                tol_deg=float(rec.get("tol_deg", 15.0)),
            )
        )
    return LensScript(tuple(kfs))
