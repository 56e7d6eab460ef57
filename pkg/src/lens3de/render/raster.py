"""Tiled CPU rasterization kernels.

The frame is partitioned into 64x64 pixel tiles. Each tile is rasterized
independently (disjoint output pixels) by a nogil numba kernel, and tiles
are dispatched on a thread pool. Because every tile walks the triangle
list in the same fixed order and owns its pixels exclusively, the output
is bit-identical for any worker count or scheduling order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

TILE = 64

_worker_threads = 4


def set_worker_threads(n: int) -> None:
    global _worker_threads
    if n < 1:
        raise ValueError("worker thread count must be >= 1")
    _worker_threads = int(n)


def get_worker_threads() -> int:
    return _worker_threads


def _tiles(width: int, height: int) -> list[tuple[int, int, int, int]]:
    out = []
    for y0 in range(0, height, TILE):
        for x0 in range(0, width, TILE):
            out.append((x0, min(x0 + TILE, width), y0, min(y0 + TILE, height)))
    return out


def _dispatch(fn, width: int, height: int) -> None:
    tiles = _tiles(width, height)
    if _worker_threads == 1 or len(tiles) == 1:
        for t in tiles:
            fn(*t)
        return
    with ThreadPoolExecutor(max_workers=_worker_threads) as pool:
        list(pool.map(lambda t: fn(*t), tiles))


@njit(cache=True, nogil=True)
def _depth_tile(x0, x1, y0, y1, sx, sy, zc, depth, slot, bary):
    for t in range(sx.shape[0]):
        ax, ay = sx[t, 0], sy[t, 0]
        bx, by = sx[t, 1], sy[t, 1]
        cx, cy = sx[t, 2], sy[t, 2]
        minx = max(x0, int(math.floor(min(ax, bx, cx))))
        maxx = min(x1, int(math.ceil(max(ax, bx, cx))) + 1)
        miny = max(y0, int(math.floor(min(ay, by, cy))))
        maxy = min(y1, int(math.ceil(max(ay, by, cy))) + 1)
        if minx >= maxx or miny >= maxy:
            continue
        area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if area == 0.0:
            continue
        inv = 1.0 / area
        z0, z1, z2 = zc[t, 0], zc[t, 1], zc[t, 2]
        for py in range(miny, maxy):
            pyc = py + 0.5
            for px in range(minx, maxx):
                pxc = px + 0.5
                e0 = ((bx - pxc) * (cy - pyc) - (by - pyc) * (cx - pxc)) * inv
                e1 = ((cx - pxc) * (ay - pyc) - (cy - pyc) * (ax - pxc)) * inv
                e2 = 1.0 - e0 - e1
                if e0 < 0.0 or e1 < 0.0 or e2 < 0.0:
                    continue
                w = e0 / z0 + e1 / z1 + e2 / z2
                if w <= 0.0:
                    continue
                z = 1.0 / w
                if z < depth[py, px]:
                    depth[py, px] = z
                    slot[py, px] = t
                    bary[py, px, 0] = e0 / z0 * z
                    bary[py, px, 1] = e1 / z1 * z
                    bary[py, px, 2] = e2 / z2 * z


@njit(cache=True, nogil=True)
def _blend_tile(x0, x1, y0, y1, sx, sy, rgba, uv, mode, spacing, phase, out):
    for t in range(sx.shape[0]):
        ax, ay = sx[t, 0], sy[t, 0]
        bx, by = sx[t, 1], sy[t, 1]
        cx, cy = sx[t, 2], sy[t, 2]
        minx = max(x0, int(math.floor(min(ax, bx, cx))))
        maxx = min(x1, int(math.ceil(max(ax, bx, cx))) + 1)
        miny = max(y0, int(math.floor(min(ay, by, cy))))
        maxy = min(y1, int(math.ceil(max(ay, by, cy))) + 1)
        if minx >= maxx or miny >= maxy:
            continue
        area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if area == 0.0:
            continue
        inv = 1.0 / area
        for py in range(miny, maxy):
            pyc = py + 0.5
            for px in range(minx, maxx):
                pxc = px + 0.5
                e0 = ((bx - pxc) * (cy - pyc) - (by - pyc) * (cx - pxc)) * inv
                e1 = ((cx - pxc) * (ay - pyc) - (cy - pyc) * (ax - pxc)) * inv
                e2 = 1.0 - e0 - e1
                if e0 < 0.0 or e1 < 0.0 or e2 < 0.0:
                    continue
                r = e0 * rgba[t, 0, 0] + e1 * rgba[t, 1, 0] + e2 * rgba[t, 2, 0]
                g = e0 * rgba[t, 0, 1] + e1 * rgba[t, 1, 1] + e2 * rgba[t, 2, 1]
                b = e0 * rgba[t, 0, 2] + e1 * rgba[t, 1, 2] + e2 * rgba[t, 2, 2]
                a = e0 * rgba[t, 0, 3] + e1 * rgba[t, 1, 3] + e2 * rgba[t, 2, 3]
                if mode[t] == 1:
                    # arrow glyph: chevron repeating along the line, offset by phase
                    u = e0 * uv[t, 0, 0] + e1 * uv[t, 1, 0] + e2 * uv[t, 2, 0]
                    v = e0 * uv[t, 0, 1] + e1 * uv[t, 1, 1] + e2 * uv[t, 2, 1]
                    s = u / spacing - phase
                    m = s - math.floor(s)
                    if m < 0.5 and abs(v) < m * 2.0:
                        r *= 0.55
                        g *= 0.55
                        b *= 0.55
                if a <= 0.0:
                    continue
                ia = 1.0 - a
                out[py, px, 0] = r * a + out[py, px, 0] * ia
                out[py, px, 1] = g * a + out[py, px, 1] * ia
                out[py, px, 2] = b * a + out[py, px, 2] * ia
                out[py, px, 3] = a + out[py, px, 3] * ia


def clip_triangles_near(
    pc: np.ndarray, triangles: np.ndarray, near: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Clip camera-space triangles against the z = near plane.

    Returns (cam_verts (M,3,3), source_index (M,), vert_bary (M,3,3)) where
    vert_bary gives each output vertex's barycentric coordinates in its
    source triangle, so attributes interpolate through clipping.
    """
    pc = np.asarray(pc, dtype=np.float64)
    triangles = np.asarray(triangles, dtype=np.int64)
    if len(triangles) == 0:
        return (
            np.empty((0, 3, 3)),
            np.empty(0, dtype=np.int64),
            np.empty((0, 3, 3)),
        )
    z = pc[:, 2]
    tri_z = z[triangles]
    in_front = tri_z >= near
    count = in_front.sum(axis=1)
    keep = count == 3
    cross = (count > 0) & (count < 3)

    verts_list = [pc[triangles[keep]]]
    src_list = [np.nonzero(keep)[0]]
    bary_list = [np.broadcast_to(np.eye(3), (int(keep.sum()), 3, 3)).copy()]

    eye = np.eye(3)
    for ti in np.nonzero(cross)[0]:
        tri = triangles[ti]
        poly = []  # (cam point, bary) pairs
        for k in range(3):
            i, j = k, (k + 1) % 3
            pi, pj = pc[tri[i]], pc[tri[j]]
            bi, bj = eye[i], eye[j]
            if pi[2] >= near:
                poly.append((pi, bi))
            if (pi[2] >= near) != (pj[2] >= near):
                t = (near - pi[2]) / (pj[2] - pi[2])
                poly.append((pi + t * (pj - pi), bi + t * (bj - bi)))
        for k in range(1, len(poly) - 1):
            verts_list.append(
                np.stack([poly[0][0], poly[k][0], poly[k + 1][0]])[None]
            )
            bary_list.append(
                np.stack([poly[0][1], poly[k][1], poly[k + 1][1]])[None]
            )
            src_list.append(np.array([ti], dtype=np.int64))

    return (
        np.concatenate(verts_list),
        np.concatenate(src_list),
        np.concatenate(bary_list),
    )


def raster_depth(
    cam_verts: np.ndarray, camera
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Depth-resolved rasterization of clipped camera-space triangles.

    Returns (depth (H,W), slot (H,W) int32 with -1 for miss, bary (H,W,3)
    perspective-correct barycentrics in the clipped triangle).
    """
    H, W = camera.height, camera.width
    depth = np.full((H, W), np.inf)
    slot = np.full((H, W), -1, dtype=np.int32)
    bary = np.zeros((H, W, 3))
    if len(cam_verts):
        screen = camera.camera_to_screen(cam_verts)
        sx = np.ascontiguousarray(screen[..., 0])
        sy = np.ascontiguousarray(screen[..., 1])
        zc = np.ascontiguousarray(cam_verts[..., 2])
        _dispatch(
            lambda x0, x1, y0, y1: _depth_tile(x0, x1, y0, y1, sx, sy, zc, depth, slot, bary),
            W,
            H,
        )
    return depth, slot, bary


def raster_blend(
    cam_verts: np.ndarray,
    rgba: np.ndarray,
    uv: np.ndarray,
    mode: np.ndarray,
    camera,
    out: np.ndarray,
    spacing: float = 1.0,
    phase: float = 0.0,
) -> None:
    """Painter-order source-over blending of camera-space triangles.

    Triangles must already be depth-sorted back-to-front; each tile blends
    them in that order, so the result equals sequential blending.
    """
    if len(cam_verts) == 0:
        return
    screen = camera.camera_to_screen(cam_verts)
    sx = np.ascontiguousarray(screen[..., 0])
    sy = np.ascontiguousarray(screen[..., 1])
    rgba = np.ascontiguousarray(rgba, dtype=np.float64)
    uv = np.ascontiguousarray(uv, dtype=np.float64)
    mode = np.ascontiguousarray(mode, dtype=np.uint8)
    _dispatch(
        lambda x0, x1, y0, y1: _blend_tile(
            x0, x1, y0, y1, sx, sy, rgba, uv, mode, spacing, phase, out
        ),
        camera.width,
        camera.height,
    )
