"""Diverging colormaps with fixed control points.

Two maps are defined, each by three 8-bit sRGB control colors placed at the
domain minimum, midpoint, and maximum; lookups interpolate linearly in RGB
and clamp outside the domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONTROL_POINTS: dict[str, np.ndarray] = {
    "cool_warm": np.array([[59, 76, 192], [221, 221, 221], [180, 4, 38]], dtype=np.float64),
    "purple_green": np.array([[118, 42, 131], [247, 247, 247], [27, 120, 55]], dtype=np.float64),
}


def make_colormap(
    name: str,
    domain: tuple[float, float] | None,
    values: np.ndarray | None = None,
) -> "Colormap":
    """Colormap with an explicit domain, or one fitted to *values*."""
    if domain is None:
        if values is None or len(values) == 0:
            domain = (0.0, 1.0)
        else:
            lo, hi = float(np.min(values)), float(np.max(values))
            if hi <= lo:
                hi = lo + 1.0
            domain = (lo, hi)
    return Colormap(name, domain)


@dataclass(frozen=True)
class Colormap:
    name: str
    domain: tuple[float, float]

    def __post_init__(self):
        if self.name not in CONTROL_POINTS:
            raise ValueError(f"unknown colormap {self.name!r}; have {sorted(CONTROL_POINTS)}")
        if not self.domain[0] < self.domain[1]:
            raise ValueError("colormap domain must satisfy min < max")


def colormap_lookup(cmap: Colormap, values: np.ndarray | float) -> np.ndarray:
    """RGBA in [0, 1] for scalar value(s); clamped piecewise-linear lookup."""
    pts = CONTROL_POINTS[cmap.name] / 255.0
    lo, hi = cmap.domain
    v = np.atleast_1d(np.asarray(values, dtype=np.float64))
    t = np.clip((v - lo) / (hi - lo), 0.0, 1.0)
    rgb = np.empty(v.shape + (3,))
    low = t <= 0.5
    rgb[low] = pts[0] + (pts[1] - pts[0]) * (t[low] * 2.0)[..., None]
    rgb[~low] = pts[1] + (pts[2] - pts[1]) * ((t[~low] - 0.5) * 2.0)[..., None]
    rgba = np.concatenate([rgb, np.ones(v.shape + (1,))], axis=-1)
    if np.isscalar(values) or np.asarray(values).ndim == 0:
        return rgba[0]
    return rgba
