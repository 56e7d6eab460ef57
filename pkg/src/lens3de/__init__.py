"""3De lens engine: fused 3D-volume + surface-decal focus+context lens with
a deterministic CPU deferred renderer, selection engine, CLI, and service."""

from .geometry import (
    Ball,
    Disk,
    Lens3De,
    PatchSelection,
    ball_surface_patch,
    disk_from_lens,
    point_in_ball,
    segment_intersects_ball,
    spherical_cap_radius,
)
from .interaction import (
    EffectKind,
    EventType,
    InteractionEffect,
    InteractionEvent,
    InteractionState,
    Mode,
    evaluate_selection,
    step_interaction,
)
from .scene import (
    FrameImage,
    Scene,
    SceneFormatError,
    StreamlineSet,
    SurfaceMesh,
    load_mesh,
    load_scene,
    load_streamlines,
    save_mesh,
    save_streamlines,
    write_image,
)
from .selection import SelectionBuffer, mean_tangent, select_angular, select_containment
from .synthetic import generate_synthetic_scene

__version__ = "0.1.0"
