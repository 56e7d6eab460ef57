"""Deferred rendering passes and frame composition.

Pass order per frame: G-buffer and AL-buffer from the surface mesh, then
screen-space layers (context surface with Fresnel opacity, silhouette,
streamline billboards, decal, lens sphere + widgets), composited
back-to-front into an RGBA frame. Everything is deterministic in its
inputs; see raster.py for the tiling/threading contract.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..geometry import Ball, Lens3De, points_in_ball
from ..scene import FrameImage, StreamlineSet, SurfaceMesh
from ..selection import SelectionBuffer
from .camera import Camera
from .colormap import Colormap, colormap_lookup
from .raster import clip_triangles_near, raster_blend, raster_depth

SILHOUETTE_COLOR = (0.12, 0.12, 0.12)
UNSELECTED_LINE_RGBA = (0.55, 0.55, 0.55, 0.15)
ARROW_SPACING_FACTOR = 8.0  # glyph spacing in multiples of line thickness
LENS_SPHERE_FRESNEL_R = 3.0
CONTEXT_FRESNEL_R = 0.5


@dataclass
class GBuffer:
    """Per-pixel geometry of the nearest surface hit."""

    hit: np.ndarray  # (H, W) bool
    depth: np.ndarray  # (H, W) float64, camera-space z; inf where miss
    triangle: np.ndarray  # (H, W) int32 source triangle id; -1 where miss
    bary: np.ndarray  # (H, W, 3) perspective-correct source-triangle bary
    position: np.ndarray  # (H, W, 3) world position; 0 where miss
    normal: np.ndarray  # (H, W, 3) unit world normal; 0 where miss


@dataclass
class ALBuffer:
    """Per-pixel raw surface attribute scalars, one layer per attribute."""

    layers: dict[str, np.ndarray] = field(default_factory=dict)


def rasterize_gbuffer(mesh: SurfaceMesh, camera: Camera) -> GBuffer:
    """Perspective rasterization with nearest-depth resolution."""
    H, W = camera.height, camera.width
    pc = camera.world_to_camera(mesh.vertices)
    cam_tris, src, vbary = clip_triangles_near(pc, mesh.triangles, camera.near)
    depth, slot, pbary = raster_depth(cam_tris, camera)
    hit = slot >= 0
    triangle = np.full((H, W), -1, dtype=np.int32)
    bary = np.zeros((H, W, 3))
    position = np.zeros((H, W, 3))
    normal = np.zeros((H, W, 3))
    if hit.any():
        m = slot[hit]
        triangle[hit] = src[m].astype(np.int32)
        comp = np.einsum("kj,kji->ki", pbary[hit], vbary[m])
        bary[hit] = comp
        tri_idx = mesh.triangles[src[m]]
        position[hit] = np.einsum("ki,kij->kj", comp, mesh.vertices[tri_idx])
        n = np.einsum("ki,kij->kj", comp, mesh.normals[tri_idx])
        ln = np.linalg.norm(n, axis=1, keepdims=True)
        ln[ln < 1e-20] = 1.0
        normal[hit] = n / ln
    return GBuffer(hit, depth, triangle, bary, position, normal)


def rasterize_albuffer(mesh: SurfaceMesh, camera: Camera, gbuffer: GBuffer) -> ALBuffer:
    """Interpolate every mesh attribute layer at G-buffer hit pixels."""
    out = ALBuffer()
    hit = gbuffer.hit
    tri_idx = mesh.triangles[gbuffer.triangle[hit]]
    for name, layer in mesh.attribute_layers.items():
        img = np.zeros(hit.shape)
        img[hit] = np.einsum("ki,ki->k", gbuffer.bary[hit], layer[tri_idx])
        out.layers[name] = img
    return out


def fresnel_opacity(v: np.ndarray, n: np.ndarray, r: float) -> float | np.ndarray:
    """View-dependent opacity 1 - |v . n|^r; in [0, 1] for unit inputs."""
    if r < 0:
        raise ValueError("fall-off exponent must be >= 0")
    v = np.asarray(v, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    d = np.abs(np.sum(v * n, axis=-1))
    out = 1.0 - np.minimum(d, 1.0) ** r
    if out.ndim == 0:
        return float(out)
    return out


def context_surface_layer(gbuffer: GBuffer, camera: Camera, fresnel_r: float = CONTEXT_FRESNEL_R) -> np.ndarray:
    """Context surface RGBA: headlight-shaded gray, Fresnel alpha."""
    H, W = gbuffer.hit.shape
    layer = np.zeros((H, W, 4))
    hit = gbuffer.hit
    if hit.any():
        p = gbuffer.position[hit]
        n = gbuffer.normal[hit]
        v = camera.position - p
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        alpha = fresnel_opacity(v, n, fresnel_r)
        shade = 0.55 + 0.35 * np.abs(np.sum(v * n, axis=1))
        layer[hit, 0] = shade
        layer[hit, 1] = shade
        layer[hit, 2] = shade * 1.05
        layer[hit, 3] = alpha
    np.clip(layer, 0.0, 1.0, out=layer)
    return layer


def silhouette_mask(
    mesh: SurfaceMesh,
    camera: Camera,
    extrusion: float,
    base_hit: np.ndarray | None = None,
) -> np.ndarray:
    """Outline pixels: coverage of the normal-extruded mesh minus coverage
    of the mesh itself. Never overlaps base coverage, by construction."""
    if extrusion <= 0:
        raise ValueError("extrusion must be > 0")
    if base_hit is None:
        base_hit = rasterize_gbuffer(mesh, camera).hit
    extruded = mesh.vertices + extrusion * mesh.normals
    pc = camera.world_to_camera(extruded)
    cam_tris, _, _ = clip_triangles_near(pc, mesh.triangles, camera.near)
    _, slot, _ = raster_depth(cam_tris, camera)
    return (slot >= 0) & ~base_hit


def _perpendicular(v: np.ndarray) -> np.ndarray:
    """Any unit vector perpendicular to unit *v* (Gram-Schmidt vs world up,
    then x axis)."""
    for ref in (np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])):
        w = ref - np.dot(ref, v) * v
        n = np.linalg.norm(w)
        if n > 1e-8:
            return w / n
    raise AssertionError("unreachable for unit v")


def billboard_vertices(
    p: np.ndarray, next_p: np.ndarray, camera: Camera, thickness: float
) -> tuple[np.ndarray, np.ndarray]:
    """Upper/lower billboard vertices around *p* for the segment toward
    *next_p*: offset along the normalized cross of view and line direction,
    so the quad faces the camera with full width 2 * thickness."""
    if thickness <= 0:
        raise ValueError("thickness must be > 0")
    p = np.asarray(p, dtype=np.float64)
    next_p = np.asarray(next_p, dtype=np.float64)
    d = next_p - p
    dn = np.linalg.norm(d)
    if dn < 1e-12:
        raise ValueError("segment endpoints coincide")
    d = d / dn
    v = camera.position - p
    v = v / np.linalg.norm(v)
    w = np.cross(v, d)
    wn = np.linalg.norm(w)
    if wn < 1e-8:
        w = _perpendicular(v)
    else:
        w = w / wn
    return p + thickness * w, p - thickness * w


def _billboard_offsets(points: np.ndarray, dirs: np.ndarray, camera: Camera, thickness: float) -> np.ndarray:
    """Vectorized width vectors (N,3) for billboard quads."""
    v = camera.position - points
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    w = np.cross(v, dirs)
    wn = np.linalg.norm(w, axis=1)
    bad = wn < 1e-8
    if bad.any():
        for i in np.nonzero(bad)[0]:
            w[i] = _perpendicular(v[i])
        wn[bad] = 1.0
    return thickness * w / wn[:, None]


def _blend_sorted(cam_tris, tri_rgba, tri_uv, tri_mode, camera, out, spacing, phase):
    """Sort back-to-front by mean camera z and blend."""
    if len(cam_tris) == 0:
        return
    order = np.argsort(-cam_tris[:, :, 2].mean(axis=1), kind="stable")
    raster_blend(
        cam_tris[order], tri_rgba[order], tri_uv[order], tri_mode[order],
        camera, out, spacing, phase,
    )


def _clip_colored(world_tris, tri_rgba, tri_uv, camera):
    """Near-clip world triangles, interpolating per-vertex rgba/uv."""
    flat = world_tris.reshape(-1, 3)
    pc = camera.world_to_camera(flat)
    idx = np.arange(len(flat)).reshape(-1, 3)
    cam_tris, src, vbary = clip_triangles_near(pc, idx, camera.near)
    rgba = np.einsum("mvj,mjc->mvc", vbary, tri_rgba[src])
    uv = np.einsum("mvj,mjc->mvc", vbary, tri_uv[src])
    return cam_tris, src, rgba, uv


def render_streamlines(
    lines: StreamlineSet,
    selection: SelectionBuffer,
    attr: str,
    cmap: Colormap,
    camera: Camera,
    phase: float = 0.0,
    thickness: float = 0.02,
) -> np.ndarray:
    """Streamline layer: faint gray billboards for unselected lines, opaque
    colormapped arrow-glyph billboards for selected ones.

    ``phase`` in [0, 1) shifts the glyph pattern along the lines; animation
    is an external sweep of this parameter.
    """
    if attr not in lines.attribute_layers:
        raise KeyError(f"unknown streamline attribute {attr!r}")
    H, W = camera.height, camera.width
    out = np.zeros((H, W, 4))
    if lines.line_count == 0:
        return out

    counts = np.diff(lines.offsets)
    seg_keep = np.ones(len(lines.points) - 1, dtype=bool)
    seg_keep[lines.offsets[1:-1] - 1] = False
    seg_line = np.repeat(np.arange(lines.line_count), counts - 1)

    starts = lines.points[:-1][seg_keep]
    ends = lines.points[1:][seg_keep]
    a_start = lines.attribute_layers[attr][:-1][seg_keep]
    a_end = lines.attribute_layers[attr][1:][seg_keep]

    d = ends - starts
    seg_len = np.linalg.norm(d, axis=1)
    ok = seg_len > 1e-12
    starts, ends, d, seg_len = starts[ok], ends[ok], d[ok], seg_len[ok]
    a_start, a_end, seg_line = a_start[ok], a_end[ok], seg_line[ok]
    dirs = d / seg_len[:, None]

    # per-point arc length along each line, for the glyph pattern
    u_all = np.concatenate([[0.0], np.cumsum(seg_len)])
    line_first = np.searchsorted(seg_line, np.arange(lines.line_count), side="left")
    u_base = u_all[line_first]
    u_start = u_all[:-1] - u_base[seg_line]
    u_end = u_all[1:] - u_base[seg_line]

    w_start = _billboard_offsets(starts, dirs, camera, thickness)
    w_end = _billboard_offsets(ends, dirs, camera, thickness)

    s0 = starts + w_start
    s1 = starts - w_start
    e0 = ends + w_end
    e1 = ends - w_end
    # two triangles per quad: (s0, e0, e1) and (s0, e1, s1)
    quads = np.concatenate(
        [np.stack([s0, e0, e1], axis=1), np.stack([s0, e1, s1], axis=1)]
    )
    n_seg = len(starts)
    tri_seg = np.concatenate([np.arange(n_seg), np.arange(n_seg)])

    uv1 = np.stack(
        [
            np.stack([u_start, np.ones(n_seg)], axis=1),
            np.stack([u_end, np.ones(n_seg)], axis=1),
            np.stack([u_end, -np.ones(n_seg)], axis=1),
        ],
        axis=1,
    )
    uv2 = np.stack(
        [
            np.stack([u_start, np.ones(n_seg)], axis=1),
            np.stack([u_end, -np.ones(n_seg)], axis=1),
            np.stack([u_start, -np.ones(n_seg)], axis=1),
        ],
        axis=1,
    )
    tri_uv = np.concatenate([uv1, uv2])

    selected_line = selection.flags[seg_line]
    sel_tri = selected_line[tri_seg]

    spacing = ARROW_SPACING_FACTOR * thickness
    for pass_selected in (False, True):
        pick = sel_tri if pass_selected else ~sel_tri
        if not pick.any():
            continue
        tris = quads[pick]
        uvs = tri_uv[pick]
        if pass_selected:
            cs = colormap_lookup(cmap, a_start)
            ce = colormap_lookup(cmap, a_end)
            rgba = np.empty((len(quads), 3, 4))
            rgba[:n_seg, 0] = cs
            rgba[:n_seg, 1] = ce
            rgba[:n_seg, 2] = ce
            rgba[n_seg:, 0] = cs
            rgba[n_seg:, 1] = ce
            rgba[n_seg:, 2] = cs
            rgba = rgba[pick]
            mode = np.ones(len(tris), dtype=np.uint8)
        else:
            rgba = np.broadcast_to(
                np.asarray(UNSELECTED_LINE_RGBA), (len(tris), 3, 4)
            ).copy()
            mode = np.zeros(len(tris), dtype=np.uint8)
        cam_tris, src, rgba_c, uv_c = _clip_colored(tris, rgba, uvs, camera)
        _blend_sorted(cam_tris, rgba_c, uv_c, mode[src], camera, out, spacing, phase)
    return out


def _projected_ball_bbox(ball: Ball, camera: Camera) -> tuple[int, int, int, int] | None:
    """Conservative pixel bbox of the projected ball; None when the ball is
    entirely behind the near plane; full frame when it straddles it."""
    c = camera.world_to_camera(ball.center[None])[0]
    if c[2] + ball.radius <= camera.near:
        return None
    if c[2] - ball.radius <= camera.near:
        return 0, camera.width, 0, camera.height
    r = ball.radius
    corners = ball.center + r * np.array(
        [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
        dtype=np.float64,
    )
    screen = camera.project(corners)
    x0 = max(0, int(np.floor(screen[:, 0].min())) - 2)
    x1 = min(camera.width, int(np.ceil(screen[:, 0].max())) + 2)
    y0 = max(0, int(np.floor(screen[:, 1].min())) - 2)
    y1 = min(camera.height, int(np.ceil(screen[:, 1].max())) + 2)
    if x0 >= x1 or y0 >= y1:
        return None
    return x0, x1, y0, y1


def decal_pass(
    gbuffer: GBuffer,
    albuffer: ALBuffer,
    lens: Lens3De,
    surface_attr: str,
    cmap: Colormap,
    camera: Camera,
) -> np.ndarray:
    """Screen-space decal: opaque colormapped focus attribute on surface
    pixels whose world position lies inside the lens ball.

    Only pixels inside the projected ball's bounding box are visited; the
    result is identical to a full-frame scan.
    """
    if surface_attr not in albuffer.layers:
        raise KeyError(f"unknown surface attribute {surface_attr!r}")
    H, W = gbuffer.hit.shape
    out = np.zeros((H, W, 4))
    bbox = _projected_ball_bbox(lens.ball, camera)
    if bbox is None:
        return out
    x0, x1, y0, y1 = bbox
    hit = gbuffer.hit[y0:y1, x0:x1]
    pos = gbuffer.position[y0:y1, x0:x1][hit]
    inside = points_in_ball(pos, lens.ball)
    vals = albuffer.layers[surface_attr][y0:y1, x0:x1][hit][inside]
    colors = colormap_lookup(cmap, vals)
    sub = np.zeros(hit.shape + (4,))
    idx = np.nonzero(hit)
    sel = (idx[0][inside], idx[1][inside])
    sub[sel] = colors
    out[y0:y1, x0:x1] = sub
    return out


def _uv_sphere(center: np.ndarray, radius: float, stacks: int = 20, slices: int = 40):
    """Tessellated sphere: (verts (N,3), normals (N,3), tris (T,3))."""
    phi = np.linspace(0.0, np.pi, stacks + 1)
    theta = np.linspace(0.0, 2.0 * np.pi, slices, endpoint=False)
    P, T = np.meshgrid(phi, theta, indexing="ij")
    n = np.stack(
        [np.sin(P) * np.cos(T), np.cos(P), np.sin(P) * np.sin(T)], axis=-1
    ).reshape(-1, 3)
    verts = center + radius * n
    tris = []
    for i in range(stacks):
        for j in range(slices):
            a = i * slices + j
            b = i * slices + (j + 1) % slices
            c = (i + 1) * slices + j
            d = (i + 1) * slices + (j + 1) % slices
            if i > 0:
                tris.append([a, b, d])
            if i < stacks - 1:
                tris.append([a, d, c])
    return verts, n, np.asarray(tris, dtype=np.int64)


def _segments_as_quads(seg_a, seg_b, camera, thickness, rgba):
    """Thin camera-facing quads for widget line segments."""
    d = seg_b - seg_a
    ln = np.linalg.norm(d, axis=1)
    ok = ln > 1e-12
    seg_a, seg_b, d, ln = seg_a[ok], seg_b[ok], d[ok], ln[ok]
    dirs = d / ln[:, None]
    wa = _billboard_offsets(seg_a, dirs, camera, thickness)
    wb = _billboard_offsets(seg_b, dirs, camera, thickness)
    tris = np.concatenate(
        [
            np.stack([seg_a + wa, seg_b + wb, seg_b - wb], axis=1),
            np.stack([seg_a + wa, seg_b - wb, seg_a - wa], axis=1),
        ]
    )
    colors = np.broadcast_to(np.asarray(rgba), (len(tris), 3, 4)).copy()
    return tris, colors


def render_lens_and_widgets(
    lens: Lens3De,
    camera: Camera,
    show_disk: bool = True,
    show_center_ball: bool = True,
) -> np.ndarray:
    """Lens sphere with rim-opaque Fresnel shading plus the orientation-disk
    wireframe, direction arrow, and center ball marker."""
    H, W = camera.height, camera.width
    out = np.zeros((H, W, 4))
    ball = lens.ball
    verts, normals, tris = _uv_sphere(ball.center, ball.radius)
    v = camera.position - verts
    vn = v / np.linalg.norm(v, axis=1, keepdims=True)
    alpha = fresnel_opacity(vn, normals, LENS_SPHERE_FRESNEL_R)
    vert_rgba = np.stack(
        [
            np.full(len(verts), 0.85),
            np.full(len(verts), 0.88),
            np.full(len(verts), 0.97),
            np.asarray(alpha),
        ],
        axis=1,
    )
    # front-facing half only; the back hemisphere would double rim opacity
    facing = np.einsum("ij,ij->i", vn[tris].mean(axis=1), normals[tris].mean(axis=1)) > 0.0
    tris = tris[facing]
    world_tris = verts[tris]
    tri_rgba = vert_rgba[tris]
    tri_uv = np.zeros((len(tris), 3, 2))
    cam_tris, src, rgba_c, uv_c = _clip_colored(world_tris, tri_rgba, tri_uv, camera)
    _blend_sorted(cam_tris, rgba_c, uv_c, np.zeros(len(cam_tris), dtype=np.uint8), camera, out, 1.0, 0.0)

    widget_tris = []
    widget_rgba = []
    thickness = 0.012 * ball.radius
    if show_disk and lens.disk_normal is not None:
        n = lens.disk_normal
        e1 = _perpendicular(n)
        e2 = np.cross(n, e1)
        ang = np.linspace(0.0, 2.0 * np.pi, 65)
        ring = ball.center + ball.radius * (
            np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2
        )
        t, c = _segments_as_quads(ring[:-1], ring[1:], camera, thickness, (0.08, 0.08, 0.08, 1.0))
        widget_tris.append(t)
        widget_rgba.append(c)
        # direction arrow along +normal; flipping the normal flips it
        shaft = np.array([ball.center, ball.center + 1.3 * ball.radius * n])
        t, c = _segments_as_quads(shaft[:1], shaft[1:], camera, thickness * 1.5, (0.9, 0.45, 0.05, 1.0))
        widget_tris.append(t)
        widget_rgba.append(c)
    if show_center_ball:
        mverts, mnorm, mtris = _uv_sphere(ball.center, 0.06 * ball.radius, stacks=8, slices=16)
        mt = mverts[mtris]
        mc = np.broadcast_to(np.asarray((0.15, 0.15, 0.15, 1.0)), (len(mt), 3, 4)).copy()
        widget_tris.append(mt)
        widget_rgba.append(mc)
    if widget_tris:
        wt = np.concatenate(widget_tris)
        wc = np.concatenate(widget_rgba)
        wu = np.zeros((len(wt), 3, 2))
        cam_tris, src, rgba_c, uv_c = _clip_colored(wt, wc, wu, camera)
        _blend_sorted(cam_tris, rgba_c, uv_c, np.zeros(len(cam_tris), dtype=np.uint8), camera, out, 1.0, 0.0)
    return out


def composite(
    context_surface: np.ndarray,
    silhouette: np.ndarray,
    streamline_layer: np.ndarray,
    decal: np.ndarray,
    lens_layer: np.ndarray,
    background: tuple[int, int, int],
) -> FrameImage:
    """Source-over stack: background, context surface, silhouette outline,
    streamlines, decal, lens sphere + widgets."""
    H, W = context_surface.shape[:2]
    for layer in (streamline_layer, decal, lens_layer):
        if layer.shape[:2] != (H, W):
            raise ValueError("layer resolution mismatch")
    if silhouette.shape != (H, W):
        raise ValueError("layer resolution mismatch")
    canvas = np.empty((H, W, 3))
    canvas[:] = np.asarray(background, dtype=np.float64) / 255.0

    def over(rgba):
        a = rgba[:, :, 3:4]
        canvas[:] = rgba[:, :, :3] * a + canvas * (1.0 - a)

    over(context_surface)
    sil = np.zeros((H, W, 4))
    sil[silhouette, :3] = SILHOUETTE_COLOR
    sil[silhouette, 3] = 1.0
    over(sil)
    over(streamline_layer)
    over(decal)
    over(lens_layer)
    pixels = np.empty((H, W, 4), dtype=np.uint8)
    pixels[:, :, :3] = np.clip(np.rint(canvas * 255.0), 0, 255).astype(np.uint8)
    pixels[:, :, 3] = 255
    return FrameImage(W, H, pixels)


def render_frame(
    mesh: SurfaceMesh,
    lines: StreamlineSet,
    camera: Camera,
    surface_attr: str,
    flow_attr: str,
    surface_cmap: Colormap,
    flow_cmap: Colormap,
    lens: Lens3De | None = None,
    selection: SelectionBuffer | None = None,
    phase: float = 0.0,
    background: tuple[int, int, int] = (0, 0, 0),
    line_thickness: float = 0.02,
    fresnel_r: float = CONTEXT_FRESNEL_R,
    extrusion: float | None = None,
    timings: dict | None = None,
) -> FrameImage:
    """Render one complete frame; fills *timings* (seconds per stage) when
    a dict is passed."""
    H, W = camera.height, camera.width

    t0 = time.perf_counter()
    gbuffer = rasterize_gbuffer(mesh, camera)
    if extrusion is None:
        span = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0) if len(mesh.vertices) else np.ones(3)
        extrusion = 0.006 * float(np.linalg.norm(span))
    sil = (
        silhouette_mask(mesh, camera, extrusion, base_hit=gbuffer.hit)
        if len(mesh.triangles)
        else np.zeros((H, W), dtype=bool)
    )
    t1 = time.perf_counter()
    albuffer = rasterize_albuffer(mesh, camera, gbuffer)
    t2 = time.perf_counter()
    if lens is not None:
        decal = decal_pass(gbuffer, albuffer, lens, surface_attr, surface_cmap, camera)
    else:
        decal = np.zeros((H, W, 4))
    t3 = time.perf_counter()
    if selection is None:
        selection = SelectionBuffer(lines.seed_ids.copy(), np.zeros(lines.line_count, dtype=bool))
    line_layer = render_streamlines(
        lines, selection, flow_attr, flow_cmap, camera, phase, line_thickness
    )
    t4 = time.perf_counter()
    lens_layer = render_lens_and_widgets(lens, camera) if lens is not None else np.zeros((H, W, 4))
    context = context_surface_layer(gbuffer, camera, fresnel_r)
    frame = composite(context, sil, line_layer, decal, lens_layer, background)
    t5 = time.perf_counter()
    if timings is not None:
        timings.update(
            {
                "gbuffer": t1 - t0,
                "albuffer": t2 - t1,
                "decal": t3 - t2,
                "lines": t4 - t3,
                "composite": t5 - t4,
            }
        )
    return frame
