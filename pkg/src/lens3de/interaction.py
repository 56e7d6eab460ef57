"""Grab/ungrab interaction state machine driving the lens.

Modes: Idle, GrabbingLens, GrabbingDisk, GrabbingScale. Transitions are a
deterministic table over a finite event alphabet; invalid (state, event)
pairs are ignored with a None effect, never faulted. Selection fires
exactly once, on Ungrab from GrabbingLens.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Ball, Lens3De, disk_from_lens
from .scene import StreamlineSet
from .selection import SelectionBuffer, select_angular, select_containment

RADIUS_MIN = 0.01
RADIUS_MAX = 100.0
SCALE_GAIN = 1.0


class Mode(enum.Enum):
    IDLE = "idle"
    GRABBING_LENS = "grabbing_lens"
    GRABBING_DISK = "grabbing_disk"
    GRABBING_SCALE = "grabbing_scale"


class EventType(enum.Enum):
    GRAB_LENS = "grab"
    MOVE_TO = "move"
    UNGRAB = "ungrab"
    GRAB_DISK = "grab_disk"
    ORIENT_TO = "orient"
    UNGRAB_DISK = "ungrab_disk"
    GRAB_SCALE = "grab_scale"
    SCALE_DELTA = "scale"
    UNGRAB_SCALE = "ungrab_scale"


@dataclass(frozen=True)
class InteractionEvent:
    type: EventType
    position: np.ndarray | None = None  # MOVE_TO
    normal: np.ndarray | None = None  # ORIENT_TO
    delta: float | None = None  # SCALE_DELTA
    tol_deg: float | None = None  # ORIENT_TO, optional tolerance change


class EffectKind(enum.Enum):
    DECAL_PREVIEW = "decal_preview"
    SELECTION_TRIGGERED = "selection_triggered"
    ANGULAR_SELECTION_UPDATED = "angular_selection_updated"
    LENS_SCALED = "lens_scaled"
    NONE = "none"


@dataclass(frozen=True)
class InteractionEffect:
    kind: EffectKind
    selection: SelectionBuffer | None = None

    def __post_init__(self):
        if self.kind is EffectKind.SELECTION_TRIGGERED and self.selection is None:
            raise ValueError("SelectionTriggered must carry a selection buffer")


@dataclass(frozen=True)
class InteractionState:
    mode: Mode
    lens: Lens3De


def evaluate_selection(lines: StreamlineSet, lens: Lens3De) -> SelectionBuffer:
    """Containment selection, then the angular filter when a disk is set."""
    buf = select_containment(lines, lens.ball)
    disk = disk_from_lens(lens)
    if disk is not None:
        buf = select_angular(lines, buf, disk, lens.angular_tolerance_deg)
    return buf


def step_interaction(
    state: InteractionState, event: InteractionEvent, lines: StreamlineSet
) -> tuple[InteractionState, list[InteractionEffect]]:
    """One transition of the interaction machine.

    Returns the next state and the effects it produced. Exactly one
    SelectionTriggered is emitted per Ungrab from GrabbingLens; no other
    transition emits one.
    """
    mode, lens = state.mode, state.lens
    none = [InteractionEffect(EffectKind.NONE)]

    if event.type is EventType.GRAB_LENS and mode is Mode.IDLE:
        return InteractionState(Mode.GRABBING_LENS, lens), none

    if event.type is EventType.MOVE_TO and mode is Mode.GRABBING_LENS:
        if event.position is None:
            return state, none
        ball = Ball(np.asarray(event.position, dtype=np.float64), lens.ball.radius)
        new = replace(lens, ball=ball)
        return (
            InteractionState(mode, new),
            [InteractionEffect(EffectKind.DECAL_PREVIEW)],
        )

    if event.type is EventType.UNGRAB and mode is Mode.GRABBING_LENS:
        buf = evaluate_selection(lines, lens)
        return (
            InteractionState(Mode.IDLE, lens),
            [InteractionEffect(EffectKind.SELECTION_TRIGGERED, buf)],
        )

    if event.type is EventType.GRAB_DISK and mode is Mode.IDLE:
        return InteractionState(Mode.GRABBING_DISK, lens), none

    if event.type is EventType.ORIENT_TO and mode is Mode.GRABBING_DISK:
        if event.normal is None:
            return state, none
        tol = lens.angular_tolerance_deg if event.tol_deg is None else float(event.tol_deg)
        new = replace(
            lens,
            disk_normal=np.asarray(event.normal, dtype=np.float64),
            angular_tolerance_deg=tol,
        )
        buf = evaluate_selection(lines, new)
        return (
            InteractionState(mode, new),
            [InteractionEffect(EffectKind.ANGULAR_SELECTION_UPDATED, buf)],
        )

    if event.type is EventType.UNGRAB_DISK and mode is Mode.GRABBING_DISK:
        return InteractionState(Mode.IDLE, lens), none

    if event.type is EventType.GRAB_SCALE and mode is Mode.IDLE:
        return InteractionState(Mode.GRABBING_SCALE, lens), none

    if event.type is EventType.SCALE_DELTA and mode is Mode.GRABBING_SCALE:
        if event.delta is None:
            return state, none
        r = lens.ball.radius * math.exp(SCALE_GAIN * float(event.delta))
        r = min(RADIUS_MAX, max(RADIUS_MIN, r))
        new = replace(lens, ball=Ball(lens.ball.center, r))
        return (
            InteractionState(mode, new),
            [InteractionEffect(EffectKind.LENS_SCALED)],
        )

    if event.type is EventType.UNGRAB_SCALE and mode is Mode.GRABBING_SCALE:
        return InteractionState(Mode.IDLE, lens), none

    return state, none
