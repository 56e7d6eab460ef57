"""Scene data types and on-disk formats.

Formats:
  * surface mesh: Wavefront OBJ subset (v / vn / f, triangles only) with an
    optional JSON attribute sidecar ``<stem>.attrs.json`` next to it mapping
    attribute name -> per-vertex array;
  * streamlines: JSON ``{"lines": [{"seed_id": int, "points": [[x,y,z], ...]}],
    "attributes": {"name": [...]}}`` with attributes concatenated in line order;
  * images: binary PPM (P6, maxval 255), alpha pre-composited over the
    background so identical frames produce identical files;
  * scene config: one JSON document, all paths relative to it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Ball, Lens3De


class SceneFormatError(ValueError):
    """Malformed scene file; message carries file/line context."""


def compute_vertex_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Area-weighted average of incident face normals, normalized per vertex."""
    normals = np.zeros_like(vertices)
    a = vertices[triangles[:, 0]]
    face = np.cross(vertices[triangles[:, 1]] - a, vertices[triangles[:, 2]] - a)
    for k in range(3):
        np.add.at(normals, triangles[:, k], face)
    lengths = np.linalg.norm(normals, axis=1, keepdims=True)
    lengths[lengths < 1e-20] = 1.0
    return normals / lengths


@dataclass
class SurfaceMesh:
    """Triangle mesh with per-vertex normals and named scalar attribute layers."""

    vertices: np.ndarray  # (N, 3) float64
    triangles: np.ndarray  # (T, 3) int64
    normals: np.ndarray | None = None  # (N, 3) float64, unit
    attribute_layers: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        n = len(self.vertices)
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= n):
            raise SceneFormatError("triangle index out of range")
        if self.normals is None:
            self.normals = compute_vertex_normals(self.vertices, self.triangles)
        else:
            self.normals = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
            if len(self.normals) != n:
                raise SceneFormatError("normal count does not match vertex count")
        for name, layer in self.attribute_layers.items():
            layer = np.asarray(layer, dtype=np.float64).ravel()
            if len(layer) != n:
                raise SceneFormatError(
                    f"attribute {name!r} has {len(layer)} values for {n} vertices"
                )
            self.attribute_layers[name] = layer

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)


@dataclass
class StreamlineSet:
    """Polylines stored as one concatenated point array plus line offsets.

    ``offsets`` has length lines+1; line i is points[offsets[i]:offsets[i+1]].
    Attribute layers are per-point, concatenated in the same order.
    """

    points: np.ndarray  # (P, 3) float64
    offsets: np.ndarray  # (L+1,) int64
    seed_ids: np.ndarray  # (L,) int64, unique
    attribute_layers: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        self.offsets = np.asarray(self.offsets, dtype=np.int64).ravel()
        self.seed_ids = np.asarray(self.seed_ids, dtype=np.int64).ravel()
        counts = np.diff(self.offsets)
        if np.any(counts < 2):
            raise SceneFormatError("every polyline needs at least 2 points")
        if len(self.seed_ids) != len(counts):
            raise SceneFormatError("seed id count does not match line count")
        if len(np.unique(self.seed_ids)) != len(self.seed_ids):
            raise SceneFormatError("duplicate seed ids")
        for name, layer in self.attribute_layers.items():
            layer = np.asarray(layer, dtype=np.float64).ravel()
            if len(layer) != len(self.points):
                raise SceneFormatError(
                    f"attribute {name!r} has {len(layer)} values for {len(self.points)} points"
                )
            self.attribute_layers[name] = layer

    @classmethod
    def from_lines(
        cls,
        lines: list[np.ndarray],
        seed_ids: list[int] | None = None,
        attribute_layers: dict[str, np.ndarray] | None = None,
    ) -> "StreamlineSet":
        if lines:
            points = np.concatenate([np.asarray(l, dtype=np.float64).reshape(-1, 3) for l in lines])
        else:
            points = np.empty((0, 3))
        offsets = np.concatenate([[0], np.cumsum([len(l) for l in lines])]).astype(np.int64)
        if seed_ids is None:
            seed_ids = list(range(len(lines)))
        return cls(points, offsets, np.asarray(seed_ids), attribute_layers or {})

    @property
    def line_count(self) -> int:
        return len(self.seed_ids)

    def line(self, i: int) -> np.ndarray:
        return self.points[self.offsets[i] : self.offsets[i + 1]]


@dataclass
class FrameImage:
    """Row-major RGBA image, 8 bits per channel."""

    width: int
    height: int
    pixels: np.ndarray  # (H, W, 4) uint8

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 4):
            raise ValueError("pixel buffer shape does not match dimensions")


def load_mesh(path: str | Path) -> SurfaceMesh:
    """Load an OBJ mesh (triangles only) plus its attribute sidecar.

    Normals come from ``vn`` lines when their count matches the vertex
    count; otherwise they are recomputed from faces.
    """
    path = Path(path)
    vertices: list[list[float]] = []
    obj_normals: list[list[float]] = []
    triangles: list[list[int]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            try:
                if tag == "v":
                    vertices.append([float(x) for x in parts[1:4]])
                elif tag == "vn":
                    obj_normals.append([float(x) for x in parts[1:4]])
                elif tag == "f":
                    if len(parts) != 4:
                        raise SceneFormatError(
                            f"{path}:{lineno}: only triangle faces are supported"
                        )
                    idx = [int(p.split("/")[0]) for p in parts[1:]]
                    if any(i <= 0 for i in idx):
                        raise SceneFormatError(
                            f"{path}:{lineno}: face indices must be positive"
                        )
                    triangles.append([i - 1 for i in idx])
            except (ValueError, IndexError) as exc:
                if isinstance(exc, SceneFormatError):
                    raise
                raise SceneFormatError(f"{path}:{lineno}: cannot parse {raw.strip()!r}") from exc
    verts = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    tris = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if tris.size and tris.max() >= len(verts):
        raise SceneFormatError(f"{path}: face index {tris.max() + 1} exceeds vertex count {len(verts)}")
    normals = None
    if len(obj_normals) == len(verts) and len(verts) > 0:
        normals = np.asarray(obj_normals, dtype=np.float64)
        lens = np.linalg.norm(normals, axis=1, keepdims=True)
        lens[lens < 1e-20] = 1.0
        normals = normals / lens
    attrs: dict[str, np.ndarray] = {}
    sidecar = path.with_suffix(".attrs.json")
    if sidecar.exists():
        with open(sidecar) as fh:
            data = json.load(fh)
        for name, values in data.items():
            values = np.asarray(values, dtype=np.float64)
            if len(values) != len(verts):
                raise SceneFormatError(
                    f"{sidecar}: attribute {name!r} has {len(values)} values "
                    f"for {len(verts)} vertices"
                )
            attrs[name] = values
    return SurfaceMesh(verts, tris, normals, attrs)


def save_mesh(mesh: SurfaceMesh, path: str | Path) -> None:
    """Write the OBJ subset plus attribute sidecar (when layers exist)."""
    path = Path(path)
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for n in mesh.normals:
            fh.write(f"vn {n[0]:.9g} {n[1]:.9g} {n[2]:.9g}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
    if mesh.attribute_layers:
        sidecar = path.with_suffix(".attrs.json")
        with open(sidecar, "w") as fh:
            json.dump({k: v.tolist() for k, v in mesh.attribute_layers.items()}, fh)


def load_streamlines(path: str | Path) -> StreamlineSet:
    """Load the native JSON streamline format."""
    path = Path(path)
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(f"{path}: invalid JSON: {exc}") from exc
    lines = []
    seed_ids = []
    next_auto = 0
    for i, rec in enumerate(data.get("lines", [])):
        pts = np.asarray(rec.get("points", []), dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 3:
            raise SceneFormatError(f"{path}: line record {i} needs >= 2 points of 3 coords")
        lines.append(pts)
        if "seed_id" in rec:
            seed_ids.append(int(rec["seed_id"]))
        else:
            seed_ids.append(next_auto)
        next_auto = max(next_auto, seed_ids[-1] + 1)
    if len(set(seed_ids)) != len(seed_ids):
        raise SceneFormatError(f"{path}: duplicate seed ids")
    attrs = {k: np.asarray(v, dtype=np.float64) for k, v in data.get("attributes", {}).items()}
    return StreamlineSet.from_lines(lines, seed_ids, attrs)


def save_streamlines(lines: StreamlineSet, path: str | Path) -> None:
    recs = []
    for i in range(lines.line_count):
        recs.append(
            {"seed_id": int(lines.seed_ids[i]), "points": lines.line(i).tolist()}
        )
    doc = {
        "lines": recs,
        "attributes": {k: v.tolist() for k, v in lines.attribute_layers.items()},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def ppm_bytes(img: FrameImage, background: tuple[int, int, int] = (0, 0, 0)) -> bytes:
    """Binary PPM (P6, maxval 255) with alpha composited over *background*."""
    rgb = img.pixels[:, :, :3].astype(np.float64)
    alpha = img.pixels[:, :, 3:4].astype(np.float64) / 255.0
    bg = np.asarray(background, dtype=np.float64)
    out = np.clip(np.rint(rgb * alpha + bg * (1.0 - alpha)), 0, 255).astype(np.uint8)
    return f"P6\n{img.width} {img.height}\n255\n".encode("ascii") + out.tobytes()


def write_image(
    img: FrameImage,
    path: str | Path,
    background: tuple[int, int, int] = (0, 0, 0),
) -> None:
    """Write the frame as binary PPM; identical images yield identical files."""
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(img, background))


@dataclass
class ColormapSpec:
    name: str
    domain: tuple[float, float] | None = None  # None: fit to attribute range


@dataclass
class SceneConfig:
    """Parsed scene configuration; paths already resolved against the file."""

    mesh_path: Path
    streamline_path: Path
    surface_focus_attribute: str
    flow_focus_attribute: str
    surface_colormap: ColormapSpec
    flow_colormap: ColormapSpec
    camera: dict
    background: tuple[int, int, int]
    initial_lens: Lens3De | None = None


@dataclass
class Scene:
    """Loaded, validated scene: mesh + streamlines + display configuration."""

    mesh: SurfaceMesh
    lines: StreamlineSet
    config: SceneConfig


def _parse_colormap(spec: dict | None, default_name: str) -> ColormapSpec:
    if spec is None:
        return ColormapSpec(default_name)
    domain = spec.get("domain")
    return ColormapSpec(spec.get("name", default_name), tuple(domain) if domain else None)


def lens_from_json(doc: dict) -> Lens3De:
    normal = doc.get("disk_normal")
    return Lens3De(
        ball=Ball(np.asarray(doc["center"], dtype=np.float64), float(doc["radius"])),
        disk_normal=None if normal is None else np.asarray(normal, dtype=np.float64),
        angular_tolerance_deg=float(doc.get("tol_deg", 15.0)),
    )


def lens_to_json(lens: Lens3De) -> dict:
    return {
        "center": [float(x) for x in lens.ball.center],
        "radius": float(lens.ball.radius),
        "disk_normal": None
        if lens.disk_normal is None
        else [float(x) for x in lens.disk_normal],
        "tol_deg": float(lens.angular_tolerance_deg),
    }


def load_scene(config_path: str | Path) -> Scene:
    """Load a scene config JSON and the data files it references."""
    config_path = Path(config_path)
    with open(config_path) as fh:
        doc = json.load(fh)
    base = config_path.parent
    cam = doc.get("camera", {})
    vfov = float(cam.get("vfov_deg", 45.0))
    if not (0.0 < vfov < 180.0):
        raise SceneFormatError(f"{config_path}: vfov_deg must be in (0, 180)")
    config = SceneConfig(
        mesh_path=base / doc["mesh"],
        streamline_path=base / doc["streamlines"],
        surface_focus_attribute=doc["surface_focus_attribute"],
        flow_focus_attribute=doc["flow_focus_attribute"],
        surface_colormap=_parse_colormap(doc.get("surface_colormap"), "purple_green"),
        flow_colormap=_parse_colormap(doc.get("flow_colormap"), "cool_warm"),
        camera={
            "position": cam.get("position", [0.0, 0.0, 5.0]),
            "look_at": cam.get("look_at", [0.0, 0.0, 0.0]),
            "up": cam.get("up", [0.0, 1.0, 0.0]),
            "vfov_deg": vfov,
            "near": float(cam.get("near", 0.05)),
            "far": float(cam.get("far", 1000.0)),
        },
        background=tuple(doc.get("background", [0, 0, 0])),
        initial_lens=lens_from_json(doc["lens"]) if "lens" in doc else None,
    )
    mesh = load_mesh(config.mesh_path)
    lines = load_streamlines(config.streamline_path)
    if config.surface_focus_attribute not in mesh.attribute_layers:
        raise SceneFormatError(
            f"{config_path}: surface attribute {config.surface_focus_attribute!r} "
            f"not in mesh layers {sorted(mesh.attribute_layers)}"
        )
    if config.flow_focus_attribute not in lines.attribute_layers:
        raise SceneFormatError(
            f"{config_path}: flow attribute {config.flow_focus_attribute!r} "
            f"not in streamline layers {sorted(lines.attribute_layers)}"
        )
    return Scene(mesh, lines, config)
