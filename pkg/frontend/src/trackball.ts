/**
 * Virtual trackball used to orient the lens disk normal with a drag.
 *
 * Screen points map onto the Shoemake sphere/hyperbola surface; the
 * rotation between the projections of two screen points is applied to the
 * current normal. Dragging back to the start point restores the normal.
 */

import { cross, dot, norm, normalize, rotateAround } from './math';
import type { Vec3 } from './types';

export interface TrackballSize {
    width: number;
    height: number;
}

/**
 * Map a pixel position to a point on the unit trackball. Inside radius
 * r/sqrt(2) the sphere is used, outside a hyperbolic sheet, which keeps
 * the mapping continuous out to the window corners.
 */
export function trackballPoint(x: number, y: number, size: TrackballSize): Vec3 {
    const r = Math.min(size.width, size.height) / 2;
    const px = (x - size.width / 2) / r;
    const py = (size.height / 2 - y) / r;
    const d2 = px * px + py * py;
    let pz: number;
    if (d2 <= 0.5) {
        pz = Math.sqrt(1 - d2);
    } else {
        pz = 0.5 / Math.sqrt(d2);
    }
    return normalize([px, py, pz]);
}

/**
 * Rotation carrying trackball point `from` to `to`, applied to `normal`.
 * A zero-length drag returns the normal unchanged.
 */
export function trackballRotate(normal: Vec3, from: Vec3, to: Vec3): Vec3 {
    const axis = cross(from, to);
    const axisLen = norm(axis);
    if (axisLen < 1e-12) {
        return normal;
    }
    const angle = Math.atan2(axisLen, dot(from, to));
    return normalize(rotateAround(normal, normalize(axis), angle));
}

/** Convenience wrapper: rotate a normal by a drag between two pixel points. */
export function dragNormal(
    normal: Vec3,
    x0: number,
    y0: number,
    x1: number,
    y1: number,
    size: TrackballSize,
): Vec3 {
    return trackballRotate(normal, trackballPoint(x0, y0, size), trackballPoint(x1, y1, size));
}
