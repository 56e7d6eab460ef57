/**
 * Diverging colormaps matching the server renderer: linear RGB
 * interpolation through three control points, values clamped to the domain.
 */

export type Rgb = [number, number, number];

const CONTROL_POINTS: Record<string, [Rgb, Rgb, Rgb]> = {
    cool_warm: [
        [59 / 255, 76 / 255, 192 / 255],
        [221 / 255, 221 / 255, 221 / 255],
        [180 / 255, 4 / 255, 38 / 255],
    ],
    purple_green: [
        [118 / 255, 42 / 255, 131 / 255],
        [247 / 255, 247 / 255, 247 / 255],
        [27 / 255, 120 / 255, 55 / 255],
    ],
};

export function colormapNames(): string[] {
    return Object.keys(CONTROL_POINTS);
}

export class DivergingColormap {
    private readonly points: [Rgb, Rgb, Rgb];

    constructor(
        public readonly name: string,
        public readonly domain: [number, number],
    ) {
        const points = CONTROL_POINTS[name];
        if (points === undefined) {
            throw new Error(`unknown colormap ${name}`);
        }
        if (!(domain[0] < domain[1])) {
            throw new Error('colormap domain must be increasing');
        }
        this.points = points;
    }

    static fitted(name: string, values: ArrayLike<number>): DivergingColormap {
        let lo = Infinity;
        let hi = -Infinity;
        for (let i = 0; i < values.length; i++) {
            const v = values[i];
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        if (!(lo < hi)) {
            hi = lo + 1;
        }
        return new DivergingColormap(name, [lo, hi]);
    }

    lookup(value: number): Rgb {
        const [lo, hi] = this.domain;
        const t = Math.min(1, Math.max(0, (value - lo) / (hi - lo)));
        const [a, b, c] = this.points;
        if (t <= 0.5) {
            return lerp(a, b, t * 2);
        }
        return lerp(b, c, (t - 0.5) * 2);
    }
}

function lerp(a: Rgb, b: Rgb, t: number): Rgb {
    return [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ];
}
