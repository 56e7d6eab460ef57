import json

import numpy as np
import pytest

from lens3de.render import Camera, set_worker_threads
from lens3de.scene import SurfaceMesh


@pytest.fixture(autouse=True)
def _single_thread():
    # deterministic anyway; single worker keeps test scheduling simple
    set_worker_threads(1)
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_plane_mesh(half_extent=1.5, divisions=120, attr_fn=None):
    """Unit-grid plane z=0 triangulated at the given resolution."""
    xs = np.linspace(-half_extent, half_extent, divisions + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    verts = np.stack([X.ravel(), Y.ravel(), np.zeros(X.size)], axis=1)
    tris = []
    n = divisions + 1
    for i in range(divisions):
        for j in range(divisions):
            a = i * n + j
            b = a + 1
            c = a + n
            d = c + 1
            tris.append([a, b, d])
            tris.append([a, d, c])
    attrs = {}
    if attr_fn is not None:
        attrs["attr"] = attr_fn(verts)
    return SurfaceMesh(verts, np.asarray(tris), attribute_layers=attrs)


def make_camera(width=256, height=256, position=(0, 0, 5), look_at=(0, 0, 0), vfov=45.0):
    return Camera(
        position=np.asarray(position, dtype=np.float64),
        look_at=np.asarray(look_at, dtype=np.float64),
        up=np.array([0.0, 1.0, 0.0]),
        vfov_deg=vfov,
        near=0.05,
        far=1000.0,
        width=width,
        height=height,
    )


def triangle_areas(vertices, triangles):
    a = vertices[triangles[:, 0]]
    cr = np.cross(vertices[triangles[:, 1]] - a, vertices[triangles[:, 2]] - a)
    return 0.5 * np.linalg.norm(cr, axis=1)


def patch_area(mesh, ball, patch, partial_samples=256, seed=7):
    """Area of the mesh patch inside the ball: full triangles exactly,
    partial triangles by uniform barycentric subsampling."""
    areas = triangle_areas(mesh.vertices, mesh.triangles)
    total = float(areas[patch.full_triangle_ids].sum())
    if len(patch.partial_triangle_ids):
        rng = np.random.default_rng(seed)
        for ti in patch.partial_triangle_ids:
            tri = mesh.vertices[mesh.triangles[ti]]
            u = rng.random((partial_samples, 2))
            flip = u.sum(axis=1) > 1.0
            u[flip] = 1.0 - u[flip]
            pts = tri[0] + u[:, :1] * (tri[1] - tri[0]) + u[:, 1:] * (tri[2] - tri[0])
            d = pts - ball.center
            frac = np.mean(np.einsum("ij,ij->i", d, d) <= ball.radius**2)
            total += float(frac * areas[ti])
    return total


def montecarlo_surface_area_in_ball(mesh, ball, samples=200_000, seed=11):
    """Independent oracle: uniform surface sampling, fraction inside ball."""
    rng = np.random.default_rng(seed)
    areas = triangle_areas(mesh.vertices, mesh.triangles)
    total = areas.sum()
    pick = rng.choice(len(areas), size=samples, p=areas / total)
    tri = mesh.vertices[mesh.triangles[pick]]
    u = rng.random((samples, 2))
    flip = u.sum(axis=1) > 1.0
    u[flip] = 1.0 - u[flip]
    pts = tri[:, 0] + u[:, :1] * (tri[:, 1] - tri[:, 0]) + u[:, 1:] * (tri[:, 2] - tri[:, 0])
    d = pts - ball.center
    inside = np.einsum("ij,ij->i", d, d) <= ball.radius**2
    return float(total * inside.mean())


def dense_sampling_line_hit(line, ball, samples_per_segment=1000):
    """Brute-force containment oracle: dense point sampling per segment."""
    t = np.linspace(0.0, 1.0, samples_per_segment)
    a = line[:-1]
    d = line[1:] - a
    pts = (a[:, None, :] + t[None, :, None] * d[:, None, :]).reshape(-1, 3)
    dd = pts - ball.center
    return bool(np.any(np.einsum("ij,ij->i", dd, dd) <= ball.radius**2))


def random_polyline(rng, n_points=6, scale=3.0):
    start = rng.uniform(-scale, scale, 3)
    steps = rng.uniform(-1.0, 1.0, (n_points - 1, 3))
    return np.concatenate([[start], start + np.cumsum(steps, axis=0)])


def write_tiny_scene(tmp_path, lines_spec, attr_name="speed"):
    """Write a minimal on-disk scene: a far-away quad plus explicit lines."""
    obj = tmp_path / "mesh.obj"
    obj.write_text(
        "v 100 100 100\nv 101 100 100\nv 100 101 100\n" "f 1 2 3\n"
    )
    (tmp_path / "mesh.attrs.json").write_text(json.dumps({"curv": [0.0, 0.0, 0.0]}))
    lines_doc = {
        "lines": [
            {"seed_id": sid, "points": [[float(c) for c in p] for p in pts]}
            for sid, pts in lines_spec
        ],
        "attributes": {attr_name: [0.5] * sum(len(p) for _, p in lines_spec)},
    }
    (tmp_path / "lines.json").write_text(json.dumps(lines_doc))
    scene = {
        "mesh": "mesh.obj",
        "streamlines": "lines.json",
        "surface_focus_attribute": "curv",
        "flow_focus_attribute": attr_name,
        "camera": {"position": [0, 0, 5], "look_at": [0, 0, 0], "vfov_deg": 45.0},
        "background": [0, 0, 0],
    }
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(scene))
    return path
