/**
 * WebSocket session to the live bridge: parse-and-dispatch incoming
 * frames, guard outgoing sends on the socket state, reconnect with a
 * fixed delay after any close, and track telemetry freshness.
 *
 * The console holds no authoritative state, so reconnecting is safe:
 * the next hello + telemetry resynchronize everything.
 */

import { ClientMessage, parseServerMessage, ServerMessage } from "./protocol.js";

/** The subset of the WebSocket API the session uses (injectable in tests). */
export interface SocketLike {
    readyState: number;
    send(data: string): void;
    close(): void;
    onopen: (() => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
    onclose: (() => void) | null;
    onerror: (() => void) | null;
}

const SOCKET_OPEN = 1;

export interface ConsoleSocketOptions {
    reconnectMs?: number;
    makeSocket?: (url: string) => SocketLike;
    now?: () => number;
}

export class ConsoleSocket {
    /** Malformed server frames dropped by validation. */
    dropped = 0;
    connected = false;

    onMessage: ((msg: ServerMessage) => void) | null = null;
    onStatus: ((connected: boolean) => void) | null = null;

    private ws: SocketLike | null = null;
    private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
    private closedByUs = false;
    private lastTelemetryAt: number | null = null;
    private readonly reconnectMs: number;
    private readonly makeSocket: (url: string) => SocketLike;
    private readonly now: () => number;

    constructor(readonly url: string, opts: ConsoleSocketOptions = {}) {
        this.reconnectMs = opts.reconnectMs ?? 1000;
        this.makeSocket =
            opts.makeSocket ?? ((u: string) => new WebSocket(u) as unknown as SocketLike);
        this.now = opts.now ?? Date.now;
    }

    connect(): void {
        if (this.ws && this.ws.readyState === SOCKET_OPEN) return;
        this.closedByUs = false;
        const ws = this.makeSocket(this.url);
        this.ws = ws;
        ws.onopen = () => {
            this.connected = true;
            this.onStatus?.(true);
        };
        ws.onmessage = (ev) => {
            if (typeof ev.data !== "string") {
                this.dropped++;
                return;
            }
            const msg = parseServerMessage(ev.data);
            if (msg === null) {
                this.dropped++;
                return;
            }
            if (msg.type === "telemetry") this.lastTelemetryAt = this.now();
            this.onMessage?.(msg);
        };
        ws.onerror = () => {
            // The close handler owns recovery; nothing to do here.
        };
        ws.onclose = () => {
            const wasConnected = this.connected;
            this.connected = false;
            this.lastTelemetryAt = null;
            if (wasConnected) this.onStatus?.(false);
            if (!this.closedByUs) this.scheduleReconnect();
        };
    }

    /** Send if the socket is open; false means the input was ignored. */
    send(msg: ClientMessage): boolean {
        if (!this.ws || this.ws.readyState !== SOCKET_OPEN) return false;
        this.ws.send(JSON.stringify(msg));
        return true;
    }

    /** Milliseconds since the last valid telemetry, or null if none yet. */
    timeSinceTelemetry(): number | null {
        return this.lastTelemetryAt === null ? null : this.now() - this.lastTelemetryAt;
    }

    /** No telemetry for longer than this while connected means stale data. */
    isStale(thresholdMs: number): boolean {
        if (!this.connected) return false;
        const age = this.timeSinceTelemetry();
        return age !== null && age > thresholdMs;
    }

    close(): void {
        this.closedByUs = true;
        if (this.reconnectTimer !== null) {
            clearTimeout(this.reconnectTimer);
            this.reconnectTimer = null;
        }
        this.ws?.close();
    }

    private scheduleReconnect(): void {
        if (this.reconnectTimer !== null) return;
        this.reconnectTimer = setTimeout(() => {
            this.reconnectTimer = null;
            this.connect();
        }, this.reconnectMs);
    }
}

/** ws:// or wss:// URL for the bridge serving this page. */
export function bridgeUrl(loc: { protocol: string; host: string }): string {
    const scheme = loc.protocol === "https:" ? "wss" : "ws";
    return `${scheme}://${loc.host}/ws`;
}
