/** Orbit camera state: target, distance, azimuth, elevation. */

import { add, cross, normalize, scale, sub } from './math';
import type { CameraConfig, Vec3 } from './types';

const MIN_DISTANCE = 1e-3;
const MAX_ELEVATION = Math.PI / 2 - 1e-3;

export class OrbitCamera {
    constructor(
        public target: Vec3,
        public distance: number,
        public azimuth: number,
        public elevation: number,
    ) {}

    static fromConfig(config: CameraConfig): OrbitCamera {
        const offset = sub(config.position, config.look_at);
        const distance = Math.hypot(offset[0], offset[1], offset[2]);
        const azimuth = Math.atan2(offset[0], offset[2]);
        const elevation = Math.asin(offset[1] / Math.max(distance, MIN_DISTANCE));
        return new OrbitCamera([...config.look_at], distance, azimuth, elevation);
    }

    position(): Vec3 {
        const ce = Math.cos(this.elevation);
        const offset: Vec3 = [
            this.distance * ce * Math.sin(this.azimuth),
            this.distance * Math.sin(this.elevation),
            this.distance * ce * Math.cos(this.azimuth),
        ];
        return add(this.target, offset);
    }

    /** Unit direction from the camera toward the target. */
    forward(): Vec3 {
        return normalize(sub(this.target, this.position()));
    }

    orbit(dAzimuth: number, dElevation: number): void {
        this.azimuth += dAzimuth;
        this.elevation = Math.min(
            MAX_ELEVATION, Math.max(-MAX_ELEVATION, this.elevation + dElevation),
        );
    }

    zoom(factor: number): void {
        this.distance = Math.max(MIN_DISTANCE, this.distance * factor);
    }

    pan(dxWorld: number, dyWorld: number): void {
        const f = this.forward();
        const right = normalize(cross(f, [0, 1, 0]));
        const up = cross(right, f);
        this.target = add(this.target, add(scale(right, dxWorld), scale(up, dyWorld)));
    }
}
