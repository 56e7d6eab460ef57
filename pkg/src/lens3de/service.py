"""Local HTTP service for the browser viewer.

JSON over HTTP on localhost. One interaction session per service instance:
lens-event handling is serialized behind a lock; read-only endpoints serve
immutable snapshots. Selection is never computed client-side; the viewer
replays its gestures through POST /lens/event and styles lines from the
``selected_seed_ids`` it gets back.
"""

from __future__ import annotations

import threading

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .geometry import Ball, Lens3De, ball_surface_patch
from .interaction import (
    EffectKind,
    EventType,
    InteractionEvent,
    InteractionState,
    Mode,
    step_interaction,
)
from .render import Camera, render_frame
from .render.colormap import make_colormap
from .scene import Scene, ppm_bytes
from .selection import SelectionBuffer


class LensModel(BaseModel):
    center: list[float]
    radius: float
    disk_normal: list[float] | None = None
    tol_deg: float = 15.0


class EventModel(BaseModel):
    type: str
    position: list[float] | None = None
    normal: list[float] | None = None
    delta: float | None = None
    tol_deg: float | None = None


class EventRequest(BaseModel):
    event: EventModel


class EventResponse(BaseModel):
    lens: LensModel
    mode: str
    effects: list[str]
    selected_seed_ids: list[int] | None = None


class SelectionResponse(BaseModel):
    selected_seed_ids: list[int]


class PatchResponse(BaseModel):
    patch_full: list[int]
    patch_partial: list[int]


def _lens_model(lens: Lens3De) -> LensModel:
    return LensModel(
        center=[float(x) for x in lens.ball.center],
        radius=float(lens.ball.radius),
        disk_normal=None
        if lens.disk_normal is None
        else [float(x) for x in lens.disk_normal],
        tol_deg=float(lens.angular_tolerance_deg),
    )


def default_lens(scene: Scene) -> Lens3De:
    lo = scene.mesh.vertices.min(axis=0)
    hi = scene.mesh.vertices.max(axis=0)
    radius = max(0.25 * float(np.linalg.norm(hi - lo)) / np.sqrt(3.0), 1e-3)
    return Lens3De(Ball((lo + hi) / 2.0, radius))


class SessionState:
    """Single interaction session: machine state + last selection."""

    def __init__(self, scene: Scene):
        self.scene = scene
        lens = scene.config.initial_lens or default_lens(scene)
        self.interaction = InteractionState(Mode.IDLE, lens)
        self.selection = SelectionBuffer(
            scene.lines.seed_ids.copy(),
            np.zeros(scene.lines.line_count, dtype=bool),
        )
        self.lock = threading.Lock()


def create_app(scene: Scene) -> FastAPI:
    app = FastAPI(title="lens3de")
    state = SessionState(scene)
    app.state.session = state

    @app.get("/scene")
    def get_scene():
        mesh, lines, cfg = scene.mesh, scene.lines, scene.config
        return {
            "mesh": {
                "vertices": mesh.vertices.ravel().tolist(),
                "normals": mesh.normals.ravel().tolist(),
                "triangles": mesh.triangles.ravel().tolist(),
                "attributes": {k: v.tolist() for k, v in mesh.attribute_layers.items()},
            },
            "lines": {
                "points": lines.points.ravel().tolist(),
                "offsets": lines.offsets.tolist(),
                "seed_ids": lines.seed_ids.tolist(),
                "attributes": {k: v.tolist() for k, v in lines.attribute_layers.items()},
            },
            "surface_focus_attribute": cfg.surface_focus_attribute,
            "flow_focus_attribute": cfg.flow_focus_attribute,
            "surface_colormap": cfg.surface_colormap.name,
            "flow_colormap": cfg.flow_colormap.name,
            "camera": cfg.camera,
            "background": list(cfg.background),
            "lens": _lens_model(state.interaction.lens).model_dump(),
        }

    @app.get("/frame")
    def get_frame(phase: float = 0.0, width: int = 800, height: int = 600):
        cfg = scene.config
        camera = Camera(
            position=np.asarray(cfg.camera["position"], dtype=np.float64),
            look_at=np.asarray(cfg.camera["look_at"], dtype=np.float64),
            up=np.asarray(cfg.camera["up"], dtype=np.float64),
            vfov_deg=cfg.camera["vfov_deg"],
            near=cfg.camera["near"],
            far=cfg.camera["far"],
            width=width,
            height=height,
        )
        surface_cmap = make_colormap(
            cfg.surface_colormap.name,
            cfg.surface_colormap.domain,
            scene.mesh.attribute_layers[cfg.surface_focus_attribute],
        )
        flow_cmap = make_colormap(
            cfg.flow_colormap.name,
            cfg.flow_colormap.domain,
            scene.lines.attribute_layers[cfg.flow_focus_attribute],
        )
        with state.lock:
            lens = state.interaction.lens
            selection = state.selection
        frame = render_frame(
            scene.mesh,
            scene.lines,
            camera,
            cfg.surface_focus_attribute,
            cfg.flow_focus_attribute,
            surface_cmap,
            flow_cmap,
            lens=lens,
            selection=selection,
            phase=phase,
            background=cfg.background,
        )
        return Response(
            content=ppm_bytes(frame, cfg.background),
            media_type="image/x-portable-pixmap",
        )

    @app.post("/lens/event", response_model=EventResponse, response_model_exclude_none=True)
    def post_event(req: EventRequest):
        ev = req.event
        try:
            etype = EventType(ev.type)
        except ValueError:
            raise HTTPException(
                status_code=400,
                detail={"code": "unknown_event_type", "message": f"unknown event type {ev.type!r}"},
            )
        event = InteractionEvent(
            type=etype,
            position=None if ev.position is None else np.asarray(ev.position, dtype=np.float64),
            normal=None if ev.normal is None else np.asarray(ev.normal, dtype=np.float64),
            delta=ev.delta,
            tol_deg=ev.tol_deg,
        )
        with state.lock:
            try:
                new_state, effects = step_interaction(state.interaction, event, scene.lines)
            except ValueError as exc:
                raise HTTPException(
                    status_code=400,
                    detail={"code": "invalid_event", "message": str(exc)},
                )
            state.interaction = new_state
            selected = None
            for eff in effects:
                if eff.selection is not None:
                    state.selection = eff.selection
                    selected = eff.selection.selected_seed_ids()
            return EventResponse(
                lens=_lens_model(new_state.lens),
                mode=new_state.mode.value,
                effects=[e.kind.value for e in effects],
                selected_seed_ids=selected,
            )

    @app.get("/selection", response_model=SelectionResponse)
    def get_selection():
        with state.lock:
            return SelectionResponse(selected_seed_ids=state.selection.selected_seed_ids())

    @app.get("/patch", response_model=PatchResponse)
    def get_patch():
        with state.lock:
            ball = state.interaction.lens.ball
        patch = ball_surface_patch(scene.mesh.vertices, scene.mesh.triangles, ball)
        return PatchResponse(
            patch_full=sorted(int(i) for i in patch.full_triangle_ids),
            patch_partial=sorted(int(i) for i in patch.partial_triangle_ids),
        )

    return app
