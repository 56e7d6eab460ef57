/**
 * Pixel ray generation and the picking math behind the gesture context:
 * ray/sphere hit tests for grabbing the lens and ray/plane intersection
 * for the view-parallel drag plane.
 */

import { add, cross, dot, normalize, scale, sub } from './math';
import type { Vec3 } from './types';

export interface PixelCamera {
    position: Vec3;
    forward: Vec3;
    up: Vec3;
    vfovDeg: number;
    width: number;
    height: number;
}

export interface Ray {
    origin: Vec3;
    dir: Vec3;
}

/** World-space ray through the center of pixel (x, y), y down. */
export function pixelRay(camera: PixelCamera, x: number, y: number): Ray {
    const forward = normalize(camera.forward);
    const right = normalize(cross(forward, camera.up));
    const up = cross(right, forward);
    const tanHalf = Math.tan((camera.vfovDeg * Math.PI) / 360);
    const aspect = camera.width / camera.height;
    const ndcX = (2 * (x + 0.5)) / camera.width - 1;
    const ndcY = 1 - (2 * (y + 0.5)) / camera.height;
    const dir = add(
        forward,
        add(scale(right, ndcX * aspect * tanHalf), scale(up, ndcY * tanHalf)),
    );
    return { origin: camera.position, dir: normalize(dir) };
}

/** Smallest positive ray parameter hitting the sphere, or null. */
export function raySphere(ray: Ray, center: Vec3, radius: number): number | null {
    const oc = sub(ray.origin, center);
    const b = dot(oc, ray.dir);
    const c = dot(oc, oc) - radius * radius;
    const disc = b * b - c;
    if (disc < 0) {
        return null;
    }
    const sq = Math.sqrt(disc);
    const t0 = -b - sq;
    if (t0 > 0) {
        return t0;
    }
    const t1 = -b + sq;
    return t1 > 0 ? t1 : null;
}

/**
 * Intersect the ray with the plane through `through` perpendicular to the
 * view direction. Null when the ray runs parallel to the plane.
 */
export function rayViewPlane(ray: Ray, through: Vec3, viewDir: Vec3): Vec3 | null {
    const denom = dot(ray.dir, viewDir);
    if (Math.abs(denom) < 1e-12) {
        return null;
    }
    const t = dot(sub(through, ray.origin), viewDir) / denom;
    if (t <= 0) {
        return null;
    }
    return add(ray.origin, scale(ray.dir, t));
}
