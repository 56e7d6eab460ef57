import { describe, expect, it } from 'vitest';

import { GestureContext, GestureController, SCALE_PER_PIXEL } from '../src/gestures';
import type { LensEvent, LensState, Vec3 } from '../src/types';

const LENS: LensState = { center: [0, 0, 0], radius: 1, disk_normal: null, tol_deg: 15 };

function makeContext(hit = true): GestureContext {
    return {
        hitLens: () => hit,
        planePoint: (x, y): Vec3 => [x / 100, -y / 100, 0],
        viewDir: () => [0, 0, -1],
        size: () => ({ width: 400, height: 400 }),
    };
}

function record(hit = true): { controller: GestureController; events: LensEvent[] } {
    const events: LensEvent[] = [];
    const controller = new GestureController(LENS, makeContext(hit), (e) => events.push(e));
    return { controller, events };
}

describe('grab / move / ungrab', () => {
    it('emits grab, move stream, ungrab for a drag over the lens', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: false, ctrl: false });
        controller.pointerMove(210, 200);
        controller.pointerMove(220, 195);
        controller.pointerUp();
        expect(events.map((e) => e.type)).toEqual(['grab', 'move', 'move', 'ungrab']);
        expect(events[1].position).toEqual([2.1, -2.0, 0]);
    });

    it('emits nothing when the press misses the lens', () => {
        const { controller, events } = record(false);
        controller.pointerDown(10, 10, { shift: false, ctrl: false });
        controller.pointerMove(20, 20);
        controller.pointerUp();
        expect(events).toEqual([]);
        expect(controller.mode).toBe('idle');
    });

    it('wheel during a grab pushes the lens along the view ray', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: false, ctrl: false });
        controller.wheel(-100);
        expect(events[1].type).toBe('move');
        const pos = events[1].position!;
        expect(pos[2]).toBeLessThan(0); // toward the scene, viewDir is -z
        expect(pos[0]).toBe(0);
    });

    it('wheel while idle is ignored', () => {
        const { controller, events } = record();
        controller.wheel(50);
        expect(events).toEqual([]);
    });
});

describe('disk orientation', () => {
    it('shift-drag emits grab_disk, orient stream, ungrab_disk', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: true, ctrl: false });
        controller.pointerMove(240, 200);
        controller.pointerUp();
        expect(events.map((e) => e.type)).toEqual(['grab_disk', 'orient', 'ungrab_disk']);
        const n = events[1].normal!;
        expect(Math.hypot(n[0], n[1], n[2])).toBeCloseTo(1, 9);
    });

    it('zero-length drag emits no orient', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: true, ctrl: false });
        controller.pointerMove(200, 200);
        controller.pointerUp();
        expect(events.map((e) => e.type)).toEqual(['grab_disk', 'ungrab_disk']);
    });

    it('shift-press off the lens emits nothing', () => {
        const { controller, events } = record(false);
        controller.pointerDown(5, 5, { shift: true, ctrl: false });
        expect(events).toEqual([]);
    });
});

describe('scaling', () => {
    it('drag right emits positive deltas, left negative', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: false, ctrl: true });
        controller.pointerMove(240, 200);
        controller.pointerMove(200, 200);
        controller.pointerUp();
        expect(events.map((e) => e.type)).toEqual(
            ['grab_scale', 'scale', 'scale', 'ungrab_scale'],
        );
        expect(events[1].delta).toBeCloseTo(40 * SCALE_PER_PIXEL, 12);
        expect(events[2].delta).toBeCloseTo(-40 * SCALE_PER_PIXEL, 12);
    });

    it('round-trip deltas sum to zero', () => {
        const { controller, events } = record();
        controller.pointerDown(100, 100, { shift: false, ctrl: true });
        controller.pointerMove(180, 100);
        controller.pointerMove(100, 100);
        controller.pointerUp();
        const total = events
            .filter((e) => e.type === 'scale')
            .reduce((acc, e) => acc + (e.delta ?? 0), 0);
        expect(total).toBeCloseTo(0, 12);
    });

    it('vertical-only motion emits no scale event', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: false, ctrl: true });
        controller.pointerMove(200, 250);
        expect(events.map((e) => e.type)).toEqual(['grab_scale']);
    });
});

describe('mode mirror', () => {
    it('tracks the server state machine alphabet', () => {
        const { controller } = record();
        expect(controller.mode).toBe('idle');
        controller.pointerDown(200, 200, { shift: false, ctrl: false });
        expect(controller.mode).toBe('grabbing_lens');
        controller.pointerUp();
        expect(controller.mode).toBe('idle');
        controller.pointerDown(200, 200, { shift: true, ctrl: false });
        expect(controller.mode).toBe('grabbing_disk');
        controller.pointerUp();
        controller.pointerDown(200, 200, { shift: false, ctrl: true });
        expect(controller.mode).toBe('grabbing_scale');
        controller.pointerUp();
        expect(controller.mode).toBe('idle');
    });

    it('a second press during a gesture is ignored', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: false, ctrl: false });
        controller.pointerDown(200, 200, { shift: false, ctrl: true });
        expect(events.map((e) => e.type)).toEqual(['grab']);
        expect(controller.mode).toBe('grabbing_lens');
    });
});

describe('tolerance slider', () => {
    it('replays an orient with the new tolerance attached', () => {
        const { controller, events } = record();
        controller.onResponse({
            lens: { ...LENS, disk_normal: [1, 0, 0] },
            mode: 'idle',
            effects: ['none'],
        });
        controller.setTolerance(30);
        expect(events.map((e) => e.type)).toEqual(['grab_disk', 'orient', 'ungrab_disk']);
        expect(events[1].tol_deg).toBe(30);
        expect(events[1].normal).toEqual([1, 0, 0]);
    });

    it('is ignored mid-gesture', () => {
        const { controller, events } = record();
        controller.pointerDown(200, 200, { shift: false, ctrl: false });
        controller.setTolerance(30);
        expect(events.map((e) => e.type)).toEqual(['grab']);
    });
});
