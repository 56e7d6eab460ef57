/**
 * Service client. All selection state comes from the server: the client
 * never computes which lines are selected, it only replays the responses.
 *
 * Every acknowledged lens event is appended to an audit log so a recorded
 * session can be replayed and checked byte-for-byte against the service.
 */

import type {
    EventResponse,
    LensEvent,
    LogEntry,
    PatchResponse,
    SceneResponse,
    SelectionResponse,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
    constructor(
        public readonly status: number,
        public readonly code: string,
        message: string,
    ) {
        super(message);
        this.name = 'ServiceError';
    }
}

export class ApiClient {
    public readonly log: LogEntry[] = [];
    /** True once a request has failed; the lens mirror is then untrusted. */
    public stale = false;

    private readonly fetchFn: FetchLike;

    constructor(
        public readonly baseUrl: string,
        fetchFn?: FetchLike,
    ) {
        this.baseUrl = baseUrl.replace(/\/$/, '');
        this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
    }

    async getScene(): Promise<SceneResponse> {
        return this.getJson<SceneResponse>('/scene');
    }

    async getSelection(): Promise<SelectionResponse> {
        return this.getJson<SelectionResponse>('/selection');
    }

    async getPatch(): Promise<PatchResponse> {
        return this.getJson<PatchResponse>('/patch');
    }

    frameUrl(phase: number, width: number, height: number): string {
        return `${this.baseUrl}/frame?phase=${phase}&width=${width}&height=${height}`;
    }

    async postEvent(event: LensEvent): Promise<EventResponse> {
        let res: Response;
        try {
            res = await this.fetchFn(`${this.baseUrl}/lens/event`, {
                method: 'POST',
                headers: { 'content-type': 'application/json' },
                body: JSON.stringify({ event }),
            });
        } catch (err) {
            this.stale = true;
            throw err;
        }
        if (!res.ok) {
            const body = await res.json().catch(() => ({ detail: {} }));
            const detail = body.detail ?? {};
            throw new ServiceError(
                res.status,
                detail.code ?? 'error',
                detail.message ?? `event rejected with status ${res.status}`,
            );
        }
        const response = (await res.json()) as EventResponse;
        this.log.push({ event, response });
        this.stale = false;
        return response;
    }

    /** Serialized audit log, one JSON object per line. */
    exportLog(): string {
        return this.log.map((entry) => JSON.stringify(entry)).join('\n');
    }

    private async getJson<T>(path: string): Promise<T> {
        let res: Response;
        try {
            res = await this.fetchFn(this.baseUrl + path);
        } catch (err) {
            this.stale = true;
            throw err;
        }
        if (!res.ok) {
            throw new ServiceError(res.status, 'error', `GET ${path} failed: ${res.status}`);
        }
        return (await res.json()) as T;
    }
}

/**
 * Replay a recorded log against an event poster (normally a fresh service
 * session) and report whether every response matches byte-for-byte.
 */
export async function replayLog(
    log: LogEntry[],
    post: (event: LensEvent) => Promise<EventResponse>,
): Promise<{ ok: boolean; firstMismatch: number }> {
    for (let i = 0; i < log.length; i++) {
        const got = await post(log[i].event);
        if (JSON.stringify(got) !== JSON.stringify(log[i].response)) {
            return { ok: false, firstMismatch: i };
        }
    }
    return { ok: true, firstMismatch: -1 };
}

/**
 * Sequential event dispatcher with at most one request in flight.
 * Consecutive pending move/orient/scale events of the same type coalesce
 * to the latest one so a fast pointer never floods the service.
 */
export class EventQueue {
    private pending: LensEvent[] = [];
    private inFlight = false;
    private flushed: Promise<void> = Promise.resolve();

    constructor(
        private readonly post: (event: LensEvent) => Promise<EventResponse>,
        private readonly onResponse: (response: EventResponse) => void,
        private readonly onError: (err: unknown) => void = () => {},
    ) {}

    push(event: LensEvent): void {
        const last = this.pending[this.pending.length - 1];
        const coalescable = event.type === 'move' || event.type === 'orient' || event.type === 'scale';
        if (last !== undefined && coalescable && last.type === event.type) {
            if (event.type === 'scale') {
                // scale deltas are increments, so merging must sum them
                this.pending[this.pending.length - 1] = {
                    type: 'scale',
                    delta: (last.delta ?? 0) + (event.delta ?? 0),
                };
            } else {
                this.pending[this.pending.length - 1] = event;
            }
        } else {
            this.pending.push(event);
        }
        if (!this.inFlight) {
            this.flushed = this.drain();
        }
    }

    /** Resolves when everything queued so far has been acknowledged. */
    idle(): Promise<void> {
        return this.flushed;
    }

    private async drain(): Promise<void> {
        this.inFlight = true;
        try {
            while (this.pending.length > 0) {
                const event = this.pending.shift()!;
                try {
                    const response = await this.post(event);
                    this.onResponse(response);
                } catch (err) {
                    this.onError(err);
                }
            }
        } finally {
            this.inFlight = false;
        }
    }
}
