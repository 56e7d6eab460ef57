/**
 * Pure viewer session state: the lens mirror, last server selection, and
 * the decal patch, decoupled from WebGL so it is testable headless.
 *
 * Styled-line changes are only ever made here from server responses, so
 * every highlight is traceable to a logged event.
 */

import type { EventResponse, LensState, PatchResponse } from './types';

export class ViewerSession {
    public lens: LensState;
    public selected: Set<number> = new Set();
    public patchFull: number[] = [];
    public patchPartial: number[] = [];
    /** Set when a request fails; cleared by the next acknowledged response. */
    public stale = false;

    constructor(initialLens: LensState) {
        this.lens = initialLens;
    }

    get highlightCount(): number {
        return this.selected.size;
    }

    applyEventResponse(response: EventResponse): void {
        this.lens = response.lens;
        this.stale = false;
        if (response.selected_seed_ids !== undefined) {
            this.selected = new Set(response.selected_seed_ids);
        }
    }

    applyPatch(patch: PatchResponse): void {
        this.patchFull = [...patch.patch_full];
        this.patchPartial = [...patch.patch_partial];
    }

    markStale(): void {
        this.stale = true;
    }

    /** Triangle ids the decal repaints: full and partial, deduplicated. */
    repaintedTriangles(): number[] {
        return [...new Set([...this.patchFull, ...this.patchPartial])].sort((a, b) => a - b);
    }

    isSelected(seedId: number): boolean {
        return this.selected.has(seedId);
    }
}
