"""Throughput benchmark over the synthetic scene.

Budget (self-imposed): one 800x600 frame of the 15K-triangle / 2K-line
scene in <= 2 s median with 4 worker threads.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from .geometry import Ball, Lens3De
from .interaction import evaluate_selection
from .render import Camera, render_frame, set_worker_threads
from .render.colormap import make_colormap
from .synthetic import TUBE_LENGTH, generate_synthetic_scene

FRAME_BUDGET_SECONDS = 2.0

STAGES = ("gbuffer", "albuffer", "decal", "lines", "composite")


@dataclass
class BenchReport:
    resolution: tuple[int, int]
    frames: int
    triangle_count: int
    line_count: int
    stage_medians: dict[str, float] = field(default_factory=dict)
    frame_median: float = 0.0

    def to_json(self) -> dict:
        return {
            "resolution": list(self.resolution),
            "frames": self.frames,
            "triangle_count": self.triangle_count,
            "line_count": self.line_count,
            "stage_medians_s": {k: round(v, 6) for k, v in self.stage_medians.items()},
            "frame_median_s": round(self.frame_median, 6),
            "budget_s": FRAME_BUDGET_SECONDS,
        }


def default_bench_camera(width: int, height: int) -> Camera:
    return Camera(
        position=np.array([TUBE_LENGTH / 2, 0.6, 3.2]),
        look_at=np.array([TUBE_LENGTH / 2, 0.0, 0.0]),
        up=np.array([0.0, 1.0, 0.0]),
        vfov_deg=45.0,
        near=0.05,
        far=100.0,
        width=width,
        height=height,
    )


def run_bench(
    triangles: int = 15000,
    lines_count: int = 2000,
    width: int = 800,
    height: int = 600,
    frames: int = 10,
    threads: int = 4,
    seed: int = 0,
) -> BenchReport:
    if frames <= 0:
        raise ValueError("frame count must be positive")
    set_worker_threads(threads)
    mesh, lines = generate_synthetic_scene(triangles, lines_count, seed)
    camera = default_bench_camera(width, height)
    lens = Lens3De(Ball(np.array([TUBE_LENGTH / 2, 0.0, 0.0]), 0.6), np.array([1.0, 0.0, 0.0]))
    selection = evaluate_selection(lines, lens)
    surface_cmap = make_colormap("purple_green", None, mesh.attribute_layers["curvature"])
    flow_cmap = make_colormap("cool_warm", None, lines.attribute_layers["speed"])
    per_stage: dict[str, list[float]] = {k: [] for k in STAGES}
    totals = []
    for i in range(frames):
        timings: dict[str, float] = {}
        render_frame(
            mesh,
            lines,
            camera,
            "curvature",
            "speed",
            surface_cmap,
            flow_cmap,
            lens=lens,
            selection=selection,
            phase=(i / frames) % 1.0,
            timings=timings,
        )
        for k in STAGES:
            per_stage[k].append(timings[k])
        totals.append(sum(timings.values()))
    return BenchReport(
        resolution=(width, height),
        frames=frames,
        triangle_count=mesh.triangle_count,
        line_count=lines.line_count,
        stage_medians={k: statistics.median(v) for k, v in per_stage.items()},
        frame_median=statistics.median(totals),
    )
