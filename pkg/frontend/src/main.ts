/** Viewer bootstrap: wires the service client, gestures, and the 3D view. */

import { ApiClient, EventQueue } from './api';
import { GestureContext, GestureController } from './gestures';
import { normalize, sub } from './math';
import { pixelRay, raySphere, rayViewPlane } from './picking';
import { ViewerSession } from './session';
import type { SceneResponse, Vec3 } from './types';
import { View3D } from './viewer';

function byId<T extends HTMLElement>(id: string): T {
    const el = document.getElementById(id);
    if (el === null) {
        throw new Error(`missing element #${id}`);
    }
    return el as T;
}

export async function start(serviceUrl: string): Promise<void> {
    const canvas = byId<HTMLCanvasElement>('view');
    const status = byId<HTMLSpanElement>('status');
    const tolSlider = byId<HTMLInputElement>('tolerance');
    const tolLabel = byId<HTMLSpanElement>('tolerance-value');
    const countLabel = byId<HTMLSpanElement>('selected-count');

    const api = new ApiClient(serviceUrl);
    let payload: SceneResponse;
    try {
        payload = await api.getScene();
    } catch (err) {
        status.textContent = `service unreachable: ${err}`;
        return;
    }

    const session = new ViewerSession(payload.lens);
    const view = new View3D(canvas, payload);
    view.applySession(session);

    const context: GestureContext = {
        hitLens: (x, y) => {
            const ray = pixelRay(cameraState(), x, y);
            return raySphere(ray, session.lens.center, session.lens.radius) !== null;
        },
        planePoint: (x, y, through) => {
            const ray = pixelRay(cameraState(), x, y);
            return rayViewPlane(ray, through, context.viewDir()) ?? through;
        },
        viewDir: () => {
            const cfg = payload.camera;
            return normalize(sub(cfg.look_at, cfg.position));
        },
        size: () => ({ width: canvas.clientWidth, height: canvas.clientHeight }),
    };

    function cameraState() {
        const cfg = payload.camera;
        return {
            position: cfg.position as Vec3,
            forward: context.viewDir(),
            up: cfg.up as Vec3,
            vfovDeg: cfg.vfov_deg,
            width: canvas.clientWidth,
            height: canvas.clientHeight,
        };
    }

    const queue = new EventQueue(
        (event) => api.postEvent(event),
        async (response) => {
            session.applyEventResponse(response);
            controller.onResponse(response);
            if (response.effects.includes('decal_preview')
                || response.effects.includes('selection_triggered')) {
                session.applyPatch(await api.getPatch());
            }
            view.applySession(session);
            countLabel.textContent = String(session.highlightCount);
            status.textContent = api.stale ? 'stale' : 'live';
        },
        () => {
            session.markStale();
            status.textContent = 'stale';
        },
    );

    const controller = new GestureController(payload.lens, context, (e) => queue.push(e));

    canvas.addEventListener('pointerdown', (e) => {
        const rect = canvas.getBoundingClientRect();
        controller.pointerDown(e.clientX - rect.left, e.clientY - rect.top, {
            shift: e.shiftKey,
            ctrl: e.ctrlKey,
        });
    });
    canvas.addEventListener('pointermove', (e) => {
        const rect = canvas.getBoundingClientRect();
        controller.pointerMove(e.clientX - rect.left, e.clientY - rect.top);
    });
    window.addEventListener('pointerup', () => controller.pointerUp());
    canvas.addEventListener('wheel', (e) => {
        e.preventDefault();
        controller.wheel(e.deltaY);
    }, { passive: false });

    tolSlider.addEventListener('change', () => {
        tolLabel.textContent = `${tolSlider.value}°`;
        controller.setTolerance(Number(tolSlider.value));
    });

    function frame(): void {
        view.render();
        requestAnimationFrame(frame);
    }
    frame();
}
