/**
 * WebGL view: builds three.js objects from the scene payload and keeps
 * them styled from the ViewerSession (server-driven selection and patch).
 *
 * The context surface gets a Fresnel-style rim opacity, unselected lines
 * are faint, selected lines are opaque and colored by the flow attribute,
 * and the decal shows by repainting the patch triangles with the surface
 * colormap. The lens sphere and disk widget are overlaid on top.
 */

import * as THREE from 'three';

import { DivergingColormap } from './colormap';
import { ViewerSession } from './session';
import type { LensState, SceneResponse } from './types';

const UNSELECTED_OPACITY = 0.15;
const CONTEXT_COLOR = new THREE.Color(0.55, 0.55, 0.58);

const fresnelVertex = `
varying vec3 vNormalW;
varying vec3 vPosW;
void main() {
    vNormalW = normalize(mat3(modelMatrix) * normal);
    vPosW = (modelMatrix * vec4(position, 1.0)).xyz;
    gl_Position = projectionMatrix * modelViewMatrix * vec4(position, 1.0);
}
`;

const fresnelFragment = `
uniform vec3 baseColor;
uniform float exponent;
varying vec3 vNormalW;
varying vec3 vPosW;
void main() {
    vec3 v = normalize(cameraPosition - vPosW);
    float facing = abs(dot(v, normalize(vNormalW)));
    float alpha = 1.0 - pow(facing, exponent);
    float shade = 0.55 + 0.35 * facing;
    gl_FragColor = vec4(baseColor * shade, alpha);
}
`;

function fresnelMaterial(color: THREE.Color, exponent: number): THREE.ShaderMaterial {
    return new THREE.ShaderMaterial({
        uniforms: {
            baseColor: { value: color },
            exponent: { value: exponent },
        },
        vertexShader: fresnelVertex,
        fragmentShader: fresnelFragment,
        transparent: true,
        depthWrite: false,
        side: THREE.DoubleSide,
    });
}

export class View3D {
    readonly scene = new THREE.Scene();
    readonly camera: THREE.PerspectiveCamera;
    readonly renderer: THREE.WebGLRenderer;

    private surface!: THREE.Mesh;
    private surfaceColors!: THREE.BufferAttribute;
    private lineObjects: Map<number, THREE.Line> = new Map();
    private lensGroup = new THREE.Group();
    private lensSphere!: THREE.Mesh;
    private diskWidget!: THREE.Group;
    private surfaceCmap: DivergingColormap;
    private flowCmap: DivergingColormap;
    private baseVertexColors!: Float32Array;

    constructor(
        canvas: HTMLCanvasElement,
        private readonly payload: SceneResponse,
    ) {
        const cfg = payload.camera;
        this.camera = new THREE.PerspectiveCamera(
            cfg.vfov_deg, canvas.clientWidth / canvas.clientHeight, cfg.near, cfg.far,
        );
        this.camera.position.fromArray(cfg.position);
        this.camera.up.fromArray(cfg.up);
        this.camera.lookAt(new THREE.Vector3().fromArray(cfg.look_at));

        this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
        const [r, g, b] = payload.background;
        this.renderer.setClearColor(new THREE.Color(r / 255, g / 255, b / 255));

        this.surfaceCmap = DivergingColormap.fitted(
            payload.surface_colormap,
            payload.mesh.attributes[payload.surface_focus_attribute] ?? [0, 1],
        );
        this.flowCmap = DivergingColormap.fitted(
            payload.flow_colormap,
            payload.lines.attributes[payload.flow_focus_attribute] ?? [0, 1],
        );

        this.buildSurface();
        this.buildLines();
        this.buildLensWidgets(payload.lens);
        this.scene.add(this.lensGroup);
    }

    private buildSurface(): void {
        const mesh = this.payload.mesh;
        const geometry = new THREE.BufferGeometry();
        geometry.setAttribute(
            'position', new THREE.BufferAttribute(new Float32Array(mesh.vertices), 3),
        );
        geometry.setAttribute(
            'normal', new THREE.BufferAttribute(new Float32Array(mesh.normals), 3),
        );
        geometry.setIndex(mesh.triangles);

        const n = mesh.vertices.length / 3;
        this.baseVertexColors = new Float32Array(n * 3);
        for (let i = 0; i < n; i++) {
            this.baseVertexColors[3 * i] = CONTEXT_COLOR.r;
            this.baseVertexColors[3 * i + 1] = CONTEXT_COLOR.g;
            this.baseVertexColors[3 * i + 2] = CONTEXT_COLOR.b;
        }
        this.surfaceColors = new THREE.BufferAttribute(this.baseVertexColors.slice(), 3);
        geometry.setAttribute('color', this.surfaceColors);

        this.surface = new THREE.Mesh(geometry, fresnelMaterial(CONTEXT_COLOR, 0.5));
        this.scene.add(this.surface);
    }

    private buildLines(): void {
        const lines = this.payload.lines;
        const values = lines.attributes[this.payload.flow_focus_attribute];
        for (let li = 0; li < lines.seed_ids.length; li++) {
            const start = lines.offsets[li];
            const end = lines.offsets[li + 1];
            const positions = new Float32Array((end - start) * 3);
            const colors = new Float32Array((end - start) * 3);
            for (let p = start; p < end; p++) {
                positions.set(lines.points.slice(3 * p, 3 * p + 3), 3 * (p - start));
                const rgb = values !== undefined
                    ? this.flowCmap.lookup(values[p])
                    : [0.7, 0.7, 0.7];
                colors.set(rgb, 3 * (p - start));
            }
            const geometry = new THREE.BufferGeometry();
            geometry.setAttribute('position', new THREE.BufferAttribute(positions, 3));
            geometry.setAttribute('color', new THREE.BufferAttribute(colors, 3));
            const material = new THREE.LineBasicMaterial({
                vertexColors: true,
                transparent: true,
                opacity: UNSELECTED_OPACITY,
            });
            const line = new THREE.Line(geometry, material);
            this.lineObjects.set(lines.seed_ids[li], line);
            this.scene.add(line);
        }
    }

    private buildLensWidgets(lens: LensState): void {
        const sphereGeo = new THREE.SphereGeometry(1, 48, 32);
        this.lensSphere = new THREE.Mesh(
            sphereGeo, fresnelMaterial(new THREE.Color(0.85, 0.88, 0.97), 3.0),
        );
        this.lensGroup.add(this.lensSphere);

        this.diskWidget = new THREE.Group();
        const ringGeo = new THREE.RingGeometry(0.96, 1.0, 64);
        const ring = new THREE.Mesh(
            ringGeo,
            new THREE.MeshBasicMaterial({ color: 0x222230, side: THREE.DoubleSide }),
        );
        const arrow = new THREE.ArrowHelper(
            new THREE.Vector3(0, 0, 1), new THREE.Vector3(0, 0, 0), 1.3, 0xe08020,
        );
        this.diskWidget.add(ring);
        this.diskWidget.add(arrow);
        this.lensGroup.add(this.diskWidget);
        this.updateLens(lens);
    }

    updateLens(lens: LensState): void {
        this.lensGroup.position.fromArray(lens.center);
        this.lensGroup.scale.setScalar(lens.radius);
        const normal = lens.disk_normal;
        this.diskWidget.visible = normal != null;
        if (normal != null) {
            const q = new THREE.Quaternion().setFromUnitVectors(
                new THREE.Vector3(0, 0, 1), new THREE.Vector3().fromArray(normal),
            );
            this.diskWidget.setRotationFromQuaternion(q);
        }
    }

    /** Restyle lines and repaint the decal patch from the session state. */
    applySession(session: ViewerSession): void {
        this.updateLens(session.lens);
        for (const [seedId, line] of this.lineObjects) {
            const material = line.material as THREE.LineBasicMaterial;
            const selected = session.isSelected(seedId);
            material.opacity = selected ? 1.0 : UNSELECTED_OPACITY;
            material.transparent = !selected;
            material.needsUpdate = true;
        }
        this.repaintPatch(session.repaintedTriangles());
    }

    private repaintPatch(triangleIds: number[]): void {
        const mesh = this.payload.mesh;
        const values = mesh.attributes[this.payload.surface_focus_attribute];
        const colors = this.surfaceColors.array as Float32Array;
        colors.set(this.baseVertexColors);
        if (values !== undefined) {
            for (const tri of triangleIds) {
                for (let k = 0; k < 3; k++) {
                    const v = mesh.triangles[3 * tri + k];
                    const rgb = this.surfaceCmap.lookup(values[v]);
                    colors.set(rgb, 3 * v);
                }
            }
        }
        this.surfaceColors.needsUpdate = true;
    }

    render(): void {
        this.renderer.render(this.scene, this.camera);
    }
}
