/** Wire types for the lens3de local service protocol. */

export type Vec3 = [number, number, number];

export interface LensState {
    center: Vec3;
    radius: number;
    disk_normal?: Vec3 | null;
    tol_deg: number;
}

export type LensEventType =
    | 'grab'
    | 'move'
    | 'ungrab'
    | 'grab_disk'
    | 'orient'
    | 'ungrab_disk'
    | 'grab_scale'
    | 'scale'
    | 'ungrab_scale';

export interface LensEvent {
    type: LensEventType;
    position?: Vec3;
    normal?: Vec3;
    delta?: number;
    tol_deg?: number;
}

export type GestureMode = 'idle' | 'grabbing_lens' | 'grabbing_disk' | 'grabbing_scale';

export interface EventResponse {
    lens: LensState;
    mode: GestureMode;
    effects: string[];
    selected_seed_ids?: number[];
}

export interface MeshPayload {
    vertices: number[];
    normals: number[];
    triangles: number[];
    attributes: Record<string, number[]>;
}

export interface LinesPayload {
    points: number[];
    offsets: number[];
    seed_ids: number[];
    attributes: Record<string, number[]>;
}

export interface CameraConfig {
    position: Vec3;
    look_at: Vec3;
    up: Vec3;
    vfov_deg: number;
    near: number;
    far: number;
}

export interface SceneResponse {
    mesh: MeshPayload;
    lines: LinesPayload;
    surface_focus_attribute: string;
    flow_focus_attribute: string;
    surface_colormap: string;
    flow_colormap: string;
    camera: CameraConfig;
    background: [number, number, number];
    lens: LensState;
}

export interface SelectionResponse {
    selected_seed_ids: number[];
}

export interface PatchResponse {
    patch_full: number[];
    patch_partial: number[];
}

export interface LogEntry {
    event: LensEvent;
    response: EventResponse;
}
