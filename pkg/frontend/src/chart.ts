/**
 * Position strip chart: a sliding window of (t, ref, pos) samples and a
 * plain canvas renderer. The buffer is the testable part; drawing is
 * pixel plumbing.
 */

export interface TracePoint {
    t: number;
    ref: number;
    pos: number;
}

export class TraceBuffer {
    private samples: TracePoint[] = [];

    constructor(readonly windowSeconds: number = 20) {}

    push(t: number, ref: number, pos: number): void {
        const last = this.samples[this.samples.length - 1];
        if (last !== undefined && t < last.t) {
            // Time went backwards: a fresh server session. Start over.
            this.samples = [];
        }
        this.samples.push({ t, ref, pos });
        const cutoff = t - this.windowSeconds;
        let drop = 0;
        while (drop < this.samples.length && this.samples[drop].t < cutoff) drop++;
        if (drop > 0) this.samples.splice(0, drop);
    }

    points(): readonly TracePoint[] {
        return this.samples;
    }

    clear(): void {
        this.samples = [];
    }

    /**
     * Axis ranges for the current window. The y range always spans at
     * least minYSpan so a flat trace is not zoomed into noise, and gets
     * 10% headroom on both sides.
     */
    range(minYSpan: number = 0.5): { tMin: number; tMax: number; yMin: number; yMax: number } {
        if (this.samples.length === 0) {
            return { tMin: 0, tMax: this.windowSeconds, yMin: -minYSpan / 2, yMax: minYSpan / 2 };
        }
        const tMax = this.samples[this.samples.length - 1].t;
        const tMin = Math.max(this.samples[0].t, tMax - this.windowSeconds);
        let yMin = Infinity;
        let yMax = -Infinity;
        for (const p of this.samples) {
            yMin = Math.min(yMin, p.ref, p.pos);
            yMax = Math.max(yMax, p.ref, p.pos);
        }
        const mid = (yMin + yMax) / 2;
        const span = Math.max(yMax - yMin, minYSpan);
        return {
            tMin,
            tMax: Math.max(tMax, tMin + 1e-9),
            yMin: mid - 0.55 * span,
            yMax: mid + 0.55 * span,
        };
    }
}

function tracePath(
    ctx: CanvasRenderingContext2D,
    buf: TraceBuffer,
    pick: (p: TracePoint) => number,
    toX: (t: number) => number,
    toY: (v: number) => number,
): void {
    ctx.beginPath();
    let started = false;
    for (const p of buf.points()) {
        const x = toX(p.t);
        const y = toY(pick(p));
        if (started) ctx.lineTo(x, y);
        else ctx.moveTo(x, y);
        started = true;
    }
    ctx.stroke();
}

export function drawStripChart(ctx: CanvasRenderingContext2D, buf: TraceBuffer): void {
    const w = ctx.canvas.width;
    const h = ctx.canvas.height;
    const { tMin, tMax, yMin, yMax } = buf.range();
    const toX = (t: number) => ((t - tMin) / (tMax - tMin)) * (w - 8) + 4;
    const toY = (v: number) => h - 4 - ((v - yMin) / (yMax - yMin)) * (h - 8);

    ctx.clearRect(0, 0, w, h);

    ctx.strokeStyle = "#d9dde3";
    ctx.lineWidth = 1;
    if (yMin < 0 && yMax > 0) {
        ctx.beginPath();
        ctx.moveTo(0, toY(0));
        ctx.lineTo(w, toY(0));
        ctx.stroke();
    }

    if (buf.points().length < 2) return;

    ctx.strokeStyle = "#8a93a2";
    ctx.lineWidth = 1.5;
    ctx.setLineDash([6, 4]);
    tracePath(ctx, buf, (p) => p.ref, toX, toY);
    ctx.setLineDash([]);

    ctx.strokeStyle = "#2563eb";
    ctx.lineWidth = 2;
    tracePath(ctx, buf, (p) => p.pos, toX, toY);
}
