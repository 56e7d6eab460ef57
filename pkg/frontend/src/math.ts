/** Minimal vector helpers over protocol-shaped [x, y, z] tuples. */

import type { Vec3 } from './types';

export function add(a: Vec3, b: Vec3): Vec3 {
    return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function sub(a: Vec3, b: Vec3): Vec3 {
    return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function scale(a: Vec3, s: number): Vec3 {
    return [a[0] * s, a[1] * s, a[2] * s];
}

export function dot(a: Vec3, b: Vec3): number {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function cross(a: Vec3, b: Vec3): Vec3 {
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
}

export function norm(a: Vec3): number {
    return Math.hypot(a[0], a[1], a[2]);
}

export function normalize(a: Vec3): Vec3 {
    const n = norm(a);
    if (n < 1e-12) {
        throw new Error('cannot normalize a zero vector');
    }
    return scale(a, 1 / n);
}

/** Rotate v by angle (radians) around a unit axis, Rodrigues' formula. */
export function rotateAround(v: Vec3, axis: Vec3, angle: number): Vec3 {
    const c = Math.cos(angle);
    const s = Math.sin(angle);
    const k = cross(axis, v);
    const d = dot(axis, v) * (1 - c);
    return [
        v[0] * c + k[0] * s + axis[0] * d,
        v[1] * c + k[1] * s + axis[1] * d,
        v[2] * c + k[2] * s + axis[2] * d,
    ];
}
