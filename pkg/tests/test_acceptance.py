"""Acceptance checks for the engine's core guarantees.

Each test prints one PASS/FAIL line so a plain ``pytest -v tests/test_acceptance.py``
run doubles as a human-readable acceptance report.
"""

import time

import numpy as np
import pytest

from lens3de.bench import FRAME_BUDGET_SECONDS, run_bench
from lens3de.geometry import Ball, Disk, Lens3De, ball_surface_patch, points_in_ball
from lens3de.interaction import (
    EffectKind,
    EventType,
    InteractionEvent,
    InteractionState,
    Mode,
    step_interaction,
)
from lens3de.render import (
    Camera,
    Colormap,
    billboard_vertices,
    decal_pass,
    fresnel_opacity,
    rasterize_albuffer,
    rasterize_gbuffer,
    render_frame,
    set_worker_threads,
)
from lens3de.render.colormap import make_colormap
from lens3de.scene import FrameImage, ppm_bytes
from lens3de.script import LensKeyframe, LensScript
from lens3de.selection import mean_tangent, select_angular, select_containment
from lens3de.synthetic import TUBE_LENGTH, generate_synthetic_scene

from conftest import (
    dense_sampling_line_hit,
    make_camera,
    make_plane_mesh,
    random_polyline,
)


def report(name, ok, detail=""):
    suffix = f"  ({detail})" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


def unit_rows(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_fresnel_formula():
    rng = np.random.default_rng(11)
    n = 100_000
    start = time.perf_counter()
    ok = True
    for r in (0.5, 3.0):
        v = unit_rows(rng, n)
        nrm = unit_rows(rng, n)
        f = fresnel_opacity(v, nrm, r)
        d = np.abs(np.einsum("ij,ij->i", v, nrm))
        ok &= bool(np.all((0.0 <= f) & (f <= 1.0)))
        ok &= bool(np.max(np.abs(f - (1.0 - d**r))) < 1e-12)
        order = np.argsort(d)
        ok &= bool(np.all(np.diff(f[order]) <= 1e-12))
        axis = np.array([1.0, 0.0, 0.0])
        ok &= fresnel_opacity(axis, axis, r) == 0.0
        ok &= fresnel_opacity(np.array([0.0, 1.0, 0.0]), axis, r) == 1.0
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1.0
    report("fresnel opacity formula (1e5 samples, <1s)", ok, f"{elapsed:.3f}s")


def test_billboard_formula():
    rng = np.random.default_rng(12)
    cam = make_camera(64, 64, position=(0, 0, 1), look_at=(0, 0, 0))
    p0, p1 = billboard_vertices(np.zeros(3), np.array([1.0, 0.0, 0.0]), cam, 0.1)
    worked = np.array_equal(p0, [0.0, 0.1, 0.0]) and np.array_equal(p1, [0.0, -0.1, 0.0])

    n = 100_000
    p = rng.uniform(-5, 5, (n, 3))
    q = p + rng.normal(size=(n, 3))
    campos = rng.uniform(-10, 10, 3)
    cam = make_camera(32, 32, position=campos, look_at=(0.0, 0.0, 0.0))
    th = rng.uniform(0.01, 1.0, n)
    max_dot = 0.0
    max_width_err = 0.0
    for i in range(n):
        if np.linalg.norm(q[i] - p[i]) < 1e-6 or np.linalg.norm(campos - p[i]) < 1e-6:
            continue
        a, b = billboard_vertices(p[i], q[i], cam, th[i])
        v = campos - p[i]
        v /= np.linalg.norm(v)
        max_dot = max(max_dot, abs((a - b) @ v))
        max_width_err = max(max_width_err, abs(np.linalg.norm(a - b) - 2 * th[i]))
    ok = worked and max_dot < 1e-9 and max_width_err < 1e-9
    report(
        "billboard vertices (1e5 inputs, 1e-9; worked example exact)",
        ok,
        f"max view dot {max_dot:.2e}, max width err {max_width_err:.2e}",
    )


def test_planar_decal_area():
    start = time.perf_counter()
    cam = make_camera(512, 512, position=(0, 0, 5))
    mesh = make_plane_mesh(2.2, 90, attr_fn=lambda v: v[:, 0])
    gb = rasterize_gbuffer(mesh, cam)
    al = rasterize_albuffer(mesh, cam, gb)
    lens = Lens3De(Ball(np.array([0.0, 0.0, 0.5]), 1.0))
    layer = decal_pass(gb, al, lens, "attr", Colormap("purple_green", (-2, 2)), cam)
    count = int((layer[:, :, 3] > 0).sum())
    footprint = (2.0 * 5.0 * np.tan(np.radians(45.0) / 2.0) / 512) ** 2
    area = count * footprint
    expected = np.pi * (1.0**2 - 0.5**2)
    elapsed = time.perf_counter() - start
    ok = abs(area - expected) <= 0.03 * expected and elapsed < 5.0
    report(
        "planar decal area within 3% of pi*(r^2-d^2) at 512x512, <5s",
        ok,
        f"area {area:.4f} vs {expected:.4f}, {elapsed:.2f}s",
    )


def test_decal_oracle_agreement():
    mesh, _ = generate_synthetic_scene(8000, 10, seed=3)
    cam = make_camera(
        320, 240, position=(TUBE_LENGTH / 2, 0.6, 3.2), look_at=(TUBE_LENGTH / 2, 0.0, 0.0)
    )
    gb = rasterize_gbuffer(mesh, cam)
    al = rasterize_albuffer(mesh, cam, gb)
    lens = Lens3De(Ball(np.array([TUBE_LENGTH / 2, 0.55, 0.55]), 0.7))
    cmap = make_colormap("purple_green", None, mesh.attribute_layers["curvature"])
    layer = decal_pass(gb, al, lens, "curvature", cmap, cam)
    covered = layer[:, :, 3] > 0

    scan = np.zeros_like(covered)
    scan[gb.hit] = points_in_ball(gb.position[gb.hit], lens.ball)
    bbox_exact = bool(np.array_equal(covered, scan))

    patch = ball_surface_patch(mesh.vertices, mesh.triangles, lens.ball)
    in_patch = np.union1d(patch.full_triangle_ids, patch.partial_triangle_ids)
    tri_ids = gb.triangle[covered]
    frac = float(np.isin(tri_ids, in_patch).mean())
    ok = bbox_exact and frac >= 0.99 and covered.sum() > 0
    report(
        "decal pixels back-project into surface patch (>=99%) and bbox scan exact",
        ok,
        f"patch fraction {frac:.4f}, pixels {int(covered.sum())}",
    )


def test_containment_and_angular_selection():
    rng = np.random.default_rng(13)
    from lens3de.scene import StreamlineSet

    lines = [random_polyline(rng) for _ in range(1000)]
    s = StreamlineSet.from_lines(lines)
    ball = Ball(np.array([0.3, -0.2, 0.1]), 1.1)
    buf = select_containment(s, ball)
    containment_ok = True
    for i, line in enumerate(lines):
        oracle = dense_sampling_line_hit(line, ball)
        if oracle and not buf.flags[i]:
            containment_ok = False
        elif buf.flags[i] and not oracle:
            if not dense_sampling_line_hit(line, ball, samples_per_segment=100_000):
                containment_ok = False

    disk = Disk(ball.center, ball.radius, np.array([0.0, 0.0, 1.0]))
    out = select_angular(s, buf, disk, 15.0)
    angular_ok = True
    cos_tol = np.cos(np.deg2rad(15.0))
    for i, line in enumerate(lines):
        if not buf.flags[i]:
            expected = False
        else:
            t = mean_tangent(line, ball)
            expected = t is not None and float(t @ disk.normal) >= cos_tol - 1e-12
        if bool(out.flags[i]) != expected:
            angular_ok = False

    def tilted(angle_deg):
        d = np.array([np.sin(np.deg2rad(angle_deg)), 0.0, np.cos(np.deg2rad(angle_deg))])
        return np.stack([-2.0 * d, 2.0 * d])

    sb = StreamlineSet.from_lines([tilted(14.0), tilted(16.0)])
    base = select_containment(sb, Ball(np.zeros(3), 1.0))
    bd = Disk(np.zeros(3), 1.0, np.array([0.0, 0.0, 1.0]))
    boundary = select_angular(sb, base, bd, 15.0).flags.tolist() == [True, False]

    ok = containment_ok and angular_ok and boundary
    report(
        "containment matches dense-sampling oracle; angular filter exact incl. 14/16 boundary",
        ok,
    )


def test_interaction_state_machine_exhaustive():
    from lens3de.scene import StreamlineSet

    lines = StreamlineSet.from_lines([np.array([[-2.0, 0, 0], [2.0, 0, 0]])])
    lens = Lens3De(Ball(np.zeros(3), 1.0))
    events = [
        InteractionEvent(EventType.GRAB_LENS),
        InteractionEvent(EventType.MOVE_TO, position=np.array([1.0, 0, 0])),
        InteractionEvent(EventType.UNGRAB),
        InteractionEvent(EventType.GRAB_DISK),
        InteractionEvent(EventType.ORIENT_TO, normal=np.array([0.0, 0.0, 1.0])),
        InteractionEvent(EventType.UNGRAB_DISK),
        InteractionEvent(EventType.GRAB_SCALE),
        InteractionEvent(EventType.SCALE_DELTA, delta=0.1),
        InteractionEvent(EventType.UNGRAB_SCALE),
    ]
    ok = True
    for mode in Mode:
        for event in events:
            _, effects = step_interaction(InteractionState(mode, lens), event, lines)
            triggered = sum(e.kind is EffectKind.SELECTION_TRIGGERED for e in effects)
            want = 1 if (mode is Mode.GRABBING_LENS and event.type is EventType.UNGRAB) else 0
            if triggered != want:
                ok = False
    report(
        "state machine: exactly one SelectionTriggered per ungrab-from-grab, none elsewhere",
        ok,
        f"{len(list(Mode)) * len(events)} (state, event) pairs",
    )


def _render_scene_bytes(mesh, lines, threads):
    set_worker_threads(threads)
    cam = Camera(
        position=np.array([TUBE_LENGTH / 2, 0.6, 3.2]),
        look_at=np.array([TUBE_LENGTH / 2, 0.0, 0.0]),
        up=np.array([0.0, 1.0, 0.0]),
        vfov_deg=45.0,
        near=0.05,
        far=100.0,
        width=800,
        height=600,
    )
    lens = Lens3De(Ball(np.array([TUBE_LENGTH / 2, 0.0, 0.0]), 0.6), np.array([1.0, 0.0, 0.0]))
    from lens3de.interaction import evaluate_selection

    selection = evaluate_selection(lines, lens)
    surface_cmap = make_colormap("purple_green", None, mesh.attribute_layers["curvature"])
    flow_cmap = make_colormap("cool_warm", None, lines.attribute_layers["speed"])
    frame = render_frame(
        mesh,
        lines,
        cam,
        "curvature",
        "speed",
        surface_cmap,
        flow_cmap,
        lens=lens,
        selection=selection,
        phase=0.25,
        background=(10, 10, 14),
    )
    return ppm_bytes(frame, (10, 10, 14))


def test_determinism_across_runs_and_threads():
    mesh, lines = generate_synthetic_scene(15000, 2000, seed=0)
    outputs = [
        _render_scene_bytes(mesh, lines, threads)
        for threads in (1, 1, 4, 4)
    ]
    ok = all(b == outputs[0] for b in outputs[1:])
    report(
        "15K-tri / 2K-line frame bit-identical across repeat runs and 1 vs 4 workers",
        ok,
        f"{len(outputs[0])} bytes each",
    )


def test_throughput_budget():
    report_obj = run_bench(
        triangles=15000, lines_count=2000, width=800, height=600, frames=10, threads=4
    )
    doc = report_obj.to_json()
    ok = (
        report_obj.frame_median <= FRAME_BUDGET_SECONDS
        and set(doc["stage_medians_s"]) == {"gbuffer", "albuffer", "decal", "lines", "composite"}
    )
    report(
        f"median frame <= {FRAME_BUDGET_SECONDS}s over 10 frames (4 workers), report emitted",
        ok,
        f"median {report_obj.frame_median:.3f}s, stages {doc['stage_medians_s']}",
    )


def test_large_scene_scripted_sweep():
    mesh, lines = generate_synthetic_scene(362000, 5000, seed=1)
    cam = make_camera(
        320, 240, position=(TUBE_LENGTH / 2, 0.6, 3.2), look_at=(TUBE_LENGTH / 2, 0.0, 0.0)
    )
    surface_cmap = make_colormap("purple_green", None, mesh.attribute_layers["curvature"])
    flow_cmap = make_colormap("cool_warm", None, lines.attribute_layers["speed"])
    center = np.array([TUBE_LENGTH / 2, 0.0, 0.0])
    normal = np.array([1.0, 0.0, 0.0])
    script = LensScript(
        (
            LensKeyframe(0.0, center, 0.6, normal, 90.0),
            LensKeyframe(1.0, center, 0.6, normal, 15.0),
        )
    )
    set_worker_threads(4)
    counts = []
    ok = True
    from lens3de.interaction import evaluate_selection

    for i in range(6):
        lens = script.lens_at(i / 5.0)
        selection = evaluate_selection(lines, lens)
        counts.append(selection.count)
        frame = render_frame(
            mesh,
            lines,
            cam,
            "curvature",
            "speed",
            surface_cmap,
            flow_cmap,
            lens=lens,
            selection=selection,
            phase=i / 6.0,
            background=(10, 10, 14),
        )
        if not isinstance(frame, FrameImage):
            ok = False
    monotone = all(b <= a for a, b in zip(counts, counts[1:]))
    ok = ok and monotone and counts[0] > counts[-1] > 0
    report(
        "362K-tri / 5K-line scripted sweep renders; tol 90->15 count monotone non-increasing",
        ok,
        f"counts {counts}",
    )
