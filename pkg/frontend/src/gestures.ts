/**
 * Mouse gesture controller: maps pointer input to the service's lens-event
 * vocabulary (grab/move/ungrab, grab_disk/orient/ungrab_disk,
 * grab_scale/scale/ungrab_scale).
 *
 * Mapping: plain drag on the lens sphere moves the lens in the
 * view-parallel plane through its center, with the scroll wheel pushing it
 * along the view ray. Shift-drag inside the lens orients the disk via a
 * virtual trackball. Ctrl-drag scales with horizontal motion (right grows).
 *
 * The controller's mode mirrors the server state machine over the same
 * event alphabet; the acknowledged lens state is applied via onResponse.
 */

import { add, scale } from './math';
import { dragNormal, TrackballSize } from './trackball';
import type { EventResponse, GestureMode, LensEvent, LensState, Vec3 } from './types';

/** Radius change per horizontal pixel (exponent units, server-side exp map). */
export const SCALE_PER_PIXEL = 1 / 200;
/** View-ray translation per wheel delta unit, in lens radii. */
export const WHEEL_GAIN = 0.001;

export interface Modifiers {
    shift: boolean;
    ctrl: boolean;
}

/** Viewer-side geometry the controller needs; supplied by the 3D view. */
export interface GestureContext {
    /** Does the pixel ray hit the current lens sphere? */
    hitLens(x: number, y: number): boolean;
    /** Pixel unprojected onto the view-parallel plane through `through`. */
    planePoint(x: number, y: number, through: Vec3): Vec3;
    /** Unit camera forward direction. */
    viewDir(): Vec3;
    size(): TrackballSize;
}

export class GestureController {
    public mode: GestureMode = 'idle';
    public lens: LensState;

    private dragStart: { x: number; y: number } | null = null;
    private dragStartNormal: Vec3 = [0, 0, 1];
    private lastX = 0;

    constructor(
        initialLens: LensState,
        private readonly context: GestureContext,
        private readonly emit: (event: LensEvent) => void,
    ) {
        this.lens = initialLens;
    }

    /** Apply an acknowledged server response; the server state is authoritative. */
    onResponse(response: EventResponse): void {
        this.lens = response.lens;
        this.mode = response.mode;
    }

    pointerDown(x: number, y: number, mods: Modifiers): void {
        if (this.mode !== 'idle') {
            return;
        }
        if (mods.ctrl) {
            this.mode = 'grabbing_scale';
            this.lastX = x;
            this.emit({ type: 'grab_scale' });
            return;
        }
        if (mods.shift) {
            if (!this.context.hitLens(x, y)) {
                return;
            }
            this.mode = 'grabbing_disk';
            this.dragStart = { x, y };
            this.dragStartNormal = this.lens.disk_normal ?? this.context.viewDir();
            this.emit({ type: 'grab_disk' });
            return;
        }
        if (this.context.hitLens(x, y)) {
            this.mode = 'grabbing_lens';
            this.emit({ type: 'grab' });
        }
    }

    pointerMove(x: number, y: number): void {
        switch (this.mode) {
            case 'grabbing_lens': {
                const position = this.context.planePoint(x, y, this.lens.center);
                this.emit({ type: 'move', position });
                break;
            }
            case 'grabbing_disk': {
                const start = this.dragStart;
                if (start === null || (x === start.x && y === start.y)) {
                    break;
                }
                const normal = dragNormal(
                    this.dragStartNormal, start.x, start.y, x, y, this.context.size(),
                );
                this.emit({ type: 'orient', normal });
                break;
            }
            case 'grabbing_scale': {
                const dx = x - this.lastX;
                if (dx !== 0) {
                    this.lastX = x;
                    this.emit({ type: 'scale', delta: dx * SCALE_PER_PIXEL });
                }
                break;
            }
            case 'idle':
                break;
        }
    }

    wheel(deltaY: number): void {
        if (this.mode !== 'grabbing_lens' || deltaY === 0) {
            return;
        }
        const step = -deltaY * WHEEL_GAIN * this.lens.radius;
        const position = add(this.lens.center, scale(this.context.viewDir(), step));
        this.emit({ type: 'move', position });
    }

    pointerUp(): void {
        switch (this.mode) {
            case 'grabbing_lens':
                this.emit({ type: 'ungrab' });
                break;
            case 'grabbing_disk':
                this.emit({ type: 'ungrab_disk' });
                break;
            case 'grabbing_scale':
                this.emit({ type: 'ungrab_scale' });
                break;
            case 'idle':
                return;
        }
        this.mode = 'idle';
        this.dragStart = null;
    }

    /**
     * Tolerance slider: re-run the angular filter at a new tolerance by
     * replaying an orient of the current normal with tol_deg attached.
     * Only valid while idle; the selection update arrives in the response.
     */
    setTolerance(tolDeg: number): void {
        if (this.mode !== 'idle') {
            return;
        }
        const normal = this.lens.disk_normal ?? this.context.viewDir();
        this.emit({ type: 'grab_disk' });
        this.emit({ type: 'orient', normal, tol_deg: tolDeg });
        this.emit({ type: 'ungrab_disk' });
    }
}
