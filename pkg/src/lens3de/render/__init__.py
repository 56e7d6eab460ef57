from .camera import Camera
from .colormap import Colormap, colormap_lookup
from .pipeline import (
    ALBuffer,
    GBuffer,
    billboard_vertices,
    composite,
    decal_pass,
    fresnel_opacity,
    rasterize_albuffer,
    rasterize_gbuffer,
    render_frame,
    render_lens_and_widgets,
    render_streamlines,
    silhouette_mask,
)
from .raster import get_worker_threads, set_worker_threads

__all__ = [
    "ALBuffer",
    "Camera",
    "Colormap",
    "GBuffer",
    "billboard_vertices",
    "colormap_lookup",
    "composite",
    "decal_pass",
    "fresnel_opacity",
    "get_worker_threads",
    "rasterize_albuffer",
    "rasterize_gbuffer",
    "render_frame",
    "render_lens_and_widgets",
    "render_streamlines",
    "set_worker_threads",
    "silhouette_mask",
]
