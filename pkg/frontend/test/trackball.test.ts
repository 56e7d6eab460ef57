import { describe, expect, it } from 'vitest';

import { dot, norm } from '../src/math';
import { dragNormal, trackballPoint, trackballRotate } from '../src/trackball';
import type { Vec3 } from '../src/types';

const SIZE = { width: 400, height: 400 };

describe('trackballPoint', () => {
    it('maps the window center to the sphere pole', () => {
        expect(trackballPoint(200, 200, SIZE)).toEqual([0, 0, 1]);
    });

    it('always returns a unit vector', () => {
        for (const [x, y] of [[0, 0], [399, 0], [200, 399], [37, 251]]) {
            expect(norm(trackballPoint(x, y, SIZE))).toBeCloseTo(1, 9);
        }
    });

    it('is continuous across the sphere/hyperbola boundary', () => {
        const r = 200 / Math.sqrt(2);
        const inside = trackballPoint(200 + r - 0.01, 200, SIZE);
        const outside = trackballPoint(200 + r + 0.01, 200, SIZE);
        expect(Math.abs(inside[2] - outside[2])).toBeLessThan(1e-3);
    });
});

describe('trackballRotate', () => {
    it('returns the normal unchanged for a zero-length drag', () => {
        const n: Vec3 = [0, 0, 1];
        const p = trackballPoint(123, 77, SIZE);
        expect(trackballRotate(n, p, p)).toEqual(n);
    });

    it('preserves unit length', () => {
        const n = dragNormal([0, 0, 1], 200, 200, 317, 44, SIZE);
        expect(norm(n)).toBeCloseTo(1, 9);
    });

    it('drag right tilts a forward normal toward +x', () => {
        const n = dragNormal([0, 0, 1], 200, 200, 280, 200, SIZE);
        expect(n[0]).toBeGreaterThan(0);
        expect(Math.abs(n[1])).toBeLessThan(1e-9);
    });

    it('drag up tilts a forward normal toward +y', () => {
        const n = dragNormal([0, 0, 1], 200, 200, 200, 120, SIZE);
        expect(n[1]).toBeGreaterThan(0);
    });

    it('drag there and back restores the normal', () => {
        const start: Vec3 = [0, 0, 1];
        const mid = dragNormal(start, 200, 200, 260, 170, SIZE);
        const back = dragNormal(mid, 260, 170, 200, 200, SIZE);
        expect(dot(back, start)).toBeCloseTo(1, 9);
    });
});
