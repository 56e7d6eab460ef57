"""Command-line entry points: headless rendering, selection dumps, scripted
animation, benchmarking, synthetic scene generation, and the viewer service.

Lens syntax: ``--lens cx,cy,cz,r [--disk nx,ny,nz] [--tol deg]``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .bench import FRAME_BUDGET_SECONDS, run_bench
from .geometry import Ball, Lens3De, ball_surface_patch
from .interaction import evaluate_selection
from .render import Camera, render_frame, set_worker_threads
from .render.colormap import make_colormap
from .scene import (
    Scene,
    SceneFormatError,
    load_scene,
    save_mesh,
    save_streamlines,
    write_image,
)
from .script import load_script
from .selection import SelectionBuffer
from .synthetic import TUBE_LENGTH, generate_synthetic_scene


def _parse_res(res: str) -> tuple[int, int]:
    try:
        w, h = res.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise click.BadParameter(f"resolution must look like 800x600, got {res!r}")


def _parse_lens(lens: str | None, disk: str | None, tol: float) -> Lens3De | None:
    if lens is None:
        return None
    try:
        cx, cy, cz, r = (float(x) for x in lens.split(","))
    except ValueError:
        raise click.BadParameter(f"--lens must be cx,cy,cz,r, got {lens!r}")
    normal = None
    if disk is not None:
        try:
            normal = np.asarray([float(x) for x in disk.split(",")], dtype=np.float64)
        except ValueError:
            raise click.BadParameter(f"--disk must be nx,ny,nz, got {disk!r}")
        normal = normal / np.linalg.norm(normal)
    return Lens3De(Ball(np.array([cx, cy, cz]), r), normal, tol)


def _camera_for(scene: Scene, width: int, height: int) -> Camera:
    c = scene.config.camera
    return Camera(
        position=np.asarray(c["position"], dtype=np.float64),
        look_at=np.asarray(c["look_at"], dtype=np.float64),
        up=np.asarray(c["up"], dtype=np.float64),
        vfov_deg=c["vfov_deg"],
        near=c["near"],
        far=c["far"],
        width=width,
        height=height,
    )


def _colormaps(scene: Scene):
    cfg = scene.config
    surface = make_colormap(
        cfg.surface_colormap.name,
        cfg.surface_colormap.domain,
        scene.mesh.attribute_layers[cfg.surface_focus_attribute],
    )
    flow = make_colormap(
        cfg.flow_colormap.name,
        cfg.flow_colormap.domain,
        scene.lines.attribute_layers[cfg.flow_focus_attribute],
    )
    return surface, flow


def _load_scene_or_die(scene_path: str) -> Scene:
    try:
        return load_scene(scene_path)
    except (OSError, KeyError, SceneFormatError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)


def _render_one(scene: Scene, lens, camera, phase: float, out_path: Path) -> SelectionBuffer:
    selection = (
        evaluate_selection(scene.lines, lens)
        if lens is not None
        else SelectionBuffer(
            scene.lines.seed_ids.copy(), np.zeros(scene.lines.line_count, dtype=bool)
        )
    )
    surface_cmap, flow_cmap = _colormaps(scene)
    frame = render_frame(
        scene.mesh,
        scene.lines,
        camera,
        scene.config.surface_focus_attribute,
        scene.config.flow_focus_attribute,
        surface_cmap,
        flow_cmap,
        lens=lens,
        selection=selection,
        phase=phase,
        background=scene.config.background,
    )
    write_image(frame, out_path, scene.config.background)
    return selection


@click.group()
def main():
    """3De lens engine."""


@main.command()
@click.argument("scene_path", type=click.Path(exists=True))
@click.option("--lens", default=None, help="cx,cy,cz,r")
@click.option("--disk", default=None, help="nx,ny,nz disk normal")
@click.option("--tol", default=15.0, show_default=True, help="angular tolerance, degrees")
@click.option("--res", default="800x600", show_default=True)
@click.option("--phase", default=0.0, show_default=True)
@click.option("--threads", default=4, show_default=True)
@click.option("--out", required=True, type=click.Path())
def render(scene_path, lens, disk, tol, res, phase, threads, out):
    """Render one PPM frame and print a selection summary as JSON."""
    set_worker_threads(threads)
    scene = _load_scene_or_die(scene_path)
    lens_obj = _parse_lens(lens, disk, tol)
    width, height = _parse_res(res)
    camera = _camera_for(scene, width, height)
    selection = _render_one(scene, lens_obj, camera, phase, Path(out))
    click.echo(json.dumps({"out": str(out), "selected_count": selection.count}))


@main.command()
@click.argument("scene_path", type=click.Path(exists=True))
@click.option("--lens", required=True, help="cx,cy,cz,r")
@click.option("--disk", default=None, help="nx,ny,nz disk normal")
@click.option("--tol", default=15.0, show_default=True)
def select(scene_path, lens, disk, tol):
    """Print the selected seed ids and surface patch for a lens as JSON."""
    scene = _load_scene_or_die(scene_path)
    lens_obj = _parse_lens(lens, disk, tol)
    selection = evaluate_selection(scene.lines, lens_obj)
    patch = ball_surface_patch(scene.mesh.vertices, scene.mesh.triangles, lens_obj.ball)
    click.echo(
        json.dumps(
            {
                "selected_seed_ids": selection.selected_seed_ids(),
                "patch": {
                    "full": sorted(int(i) for i in patch.full_triangle_ids),
                    "partial": sorted(int(i) for i in patch.partial_triangle_ids),
                },
            }
        )
    )


@main.command()
@click.argument("scene_path", type=click.Path(exists=True))
@click.argument("script_path", type=click.Path(exists=True))
@click.option("--fps", default=10.0, show_default=True)
@click.option("--res", default="800x600", show_default=True)
@click.option("--threads", default=4, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
def animate(scene_path, script_path, fps, res, threads, out_dir):
    """Render numbered frames for a lens keyframe script; lens parameters
    interpolate linearly between keyframes and selection fires per frame."""
    set_worker_threads(threads)
    scene = _load_scene_or_die(scene_path)
    try:
        script = load_script(script_path)
    except (OSError, KeyError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    if fps <= 0:
        click.echo("error: fps must be positive", err=True)
        raise SystemExit(1)
    width, height = _parse_res(res)
    camera = _camera_for(scene, width, height)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = script.keyframes[0].time
    n_frames = int(round(script.duration * fps)) + 1
    summary = []
    for i in range(n_frames):
        lens = script.lens_at(t0 + i / fps)
        phase = (i / max(n_frames - 1, 1)) % 1.0
        selection = _render_one(scene, lens, camera, phase, out / f"frame_{i:04d}.ppm")
        summary.append({"frame": i, "selected_count": selection.count})
    click.echo(json.dumps({"frames": n_frames, "selection": summary}))


@main.command()
@click.option("--triangles", default=15000, show_default=True)
@click.option("--lines", "lines_count", default=2000, show_default=True)
@click.option("--res", default="800x600", show_default=True)
@click.option("--frames", default=10, show_default=True)
@click.option("--threads", default=4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--enforce", is_flag=True, help="exit nonzero when the frame budget is exceeded")
def bench(triangles, lines_count, res, frames, threads, seed, enforce):
    """Render N frames of the synthetic scene and report per-stage medians."""
    if frames <= 0:
        click.echo("error: frames must be positive", err=True)
        raise SystemExit(1)
    width, height = _parse_res(res)
    report = run_bench(triangles, lines_count, width, height, frames, threads, seed)
    click.echo(json.dumps(report.to_json()))
    if enforce and report.frame_median > FRAME_BUDGET_SECONDS:
        click.echo(
            f"error: median frame {report.frame_median:.3f}s exceeds "
            f"budget {FRAME_BUDGET_SECONDS}s",
            err=True,
        )
        raise SystemExit(1)


@main.command()
@click.option("--triangles", default=15000, show_default=True)
@click.option("--lines", "lines_count", default=2000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
def synth(triangles, lines_count, seed, out_dir):
    """Write a synthetic tube scene (mesh, streamlines, scene config)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mesh, lines = generate_synthetic_scene(triangles, lines_count, seed)
    save_mesh(mesh, out / "mesh.obj")
    save_streamlines(lines, out / "lines.json")
    config = {
        "mesh": "mesh.obj",
        "streamlines": "lines.json",
        "surface_focus_attribute": "curvature",
        "flow_focus_attribute": "speed",
        "surface_colormap": {"name": "purple_green"},
        "flow_colormap": {"name": "cool_warm"},
        "camera": {
            "position": [TUBE_LENGTH / 2, 0.6, 3.2],
            "look_at": [TUBE_LENGTH / 2, 0.0, 0.0],
            "up": [0.0, 1.0, 0.0],
            "vfov_deg": 45.0,
            "near": 0.05,
            "far": 100.0,
        },
        "background": [10, 10, 14],
    }
    with open(out / "scene.json", "w") as fh:
        json.dump(config, fh, indent=2)
    click.echo(json.dumps({"scene": str(out / "scene.json"), "triangles": mesh.triangle_count, "lines": lines.line_count}))


@main.command()
@click.argument("scene_path", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8472, show_default=True)
@click.option("--threads", default=4, show_default=True)
def serve(scene_path, host, port, threads):
    """Serve the scene over the local JSON protocol for the browser viewer."""
    import uvicorn

    from .service import create_app

    set_worker_threads(threads)
    scene = _load_scene_or_die(scene_path)
    uvicorn.run(create_app(scene), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
