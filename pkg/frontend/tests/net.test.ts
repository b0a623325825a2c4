import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ConsoleSocket, SocketLike, bridgeUrl } from "../src/net.js";
import { ServerMessage } from "../src/protocol.js";

class FakeSocket implements SocketLike {
    readyState = 0; // CONNECTING
    sent: string[] = [];
    onopen: (() => void) | null = null;
    onmessage: ((ev: { data: unknown }) => void) | null = null;
    onclose: (() => void) | null = null;
    onerror: (() => void) | null = null;

    open(): void {
        this.readyState = 1;
        this.onopen?.();
    }

    emit(data: unknown): void {
        this.onmessage?.({ data });
    }

    dropFromServer(): void {
        this.readyState = 3;
        this.onclose?.();
    }

    send(data: string): void {
        this.sent.push(data);
    }

    close(): void {
        this.readyState = 3;
        this.onclose?.();
    }
}

function telemetryJson(overrides: Record<string, unknown> = {}): string {
    return JSON.stringify({
        type: "telemetry",
        t: 0.5,
        ref_pos: 0,
        slave_pos: 0,
        velocity: 0,
        motor_drive: 0,
        x: 0,
        y: 0,
        heading: 0,
        distance_mm: null,
        haptic_hz: 0,
        haptic_active: false,
        haptic_displacement_m: 0,
        piezo_volts: 0,
        channel: { sent: 0, dropped: 0 },
        done: false,
        ...overrides,
    });
}

function makeHarness(opts: { now?: () => number } = {}) {
    const sockets: FakeSocket[] = [];
    const received: ServerMessage[] = [];
    const statuses: boolean[] = [];
    const socket = new ConsoleSocket("ws://test/ws", {
        reconnectMs: 1000,
        makeSocket: () => {
            const ws = new FakeSocket();
            sockets.push(ws);
            return ws;
        },
        now: opts.now,
    });
    socket.onMessage = (m) => received.push(m);
    socket.onStatus = (c) => statuses.push(c);
    return { socket, sockets, received, statuses };
}

describe("ConsoleSocket", () => {
    beforeEach(() => {
        vi.useFakeTimers();
    });

    afterEach(() => {
        vi.useRealTimers();
    });

    it("dispatches validated frames", () => {
        const h = makeHarness();
        h.socket.connect();
        h.sockets[0].open();
        h.sockets[0].emit(telemetryJson());
        expect(h.received.length).toBe(1);
        expect(h.received[0].type).toBe("telemetry");
        expect(h.socket.dropped).toBe(0);
    });

    it("counts malformed frames without crashing the stream", () => {
        const h = makeHarness();
        h.socket.connect();
        h.sockets[0].open();
        h.sockets[0].emit("{broken");
        h.sockets[0].emit('{"type": "telemetry", "t": "soon"}');
        h.sockets[0].emit(new ArrayBuffer(4));
        expect(h.socket.dropped).toBe(3);
        expect(h.received.length).toBe(0);
        h.sockets[0].emit(telemetryJson());
        expect(h.received.length).toBe(1);
    });

    it("reports connection status transitions", () => {
        const h = makeHarness();
        h.socket.connect();
        h.sockets[0].open();
        h.sockets[0].dropFromServer();
        expect(h.statuses).toEqual([true, false]);
    });

    it("refuses to send while not open", () => {
        const h = makeHarness();
        h.socket.connect();
        expect(h.socket.send({ type: "ping" })).toBe(false);
        expect(h.sockets[0].sent.length).toBe(0);
        h.sockets[0].open();
        expect(h.socket.send({ type: "impulse", magnitude: 0.5 })).toBe(true);
        expect(JSON.parse(h.sockets[0].sent[0])).toEqual({ type: "impulse", magnitude: 0.5 });
    });

    it("reconnects after an unexpected close", () => {
        const h = makeHarness();
        h.socket.connect();
        h.sockets[0].open();
        h.sockets[0].dropFromServer();
        expect(h.sockets.length).toBe(1);
        vi.advanceTimersByTime(1000);
        expect(h.sockets.length).toBe(2);
        h.sockets[1].open();
        expect(h.statuses).toEqual([true, false, true]);
    });

    it("keeps retrying while the server stays down", () => {
        const h = makeHarness();
        h.socket.connect();
        h.sockets[0].dropFromServer();
        vi.advanceTimersByTime(1000);
        h.sockets[1].dropFromServer();
        vi.advanceTimersByTime(1000);
        expect(h.sockets.length).toBe(3);
    });

    it("does not reconnect after an intentional close", () => {
        const h = makeHarness();
        h.socket.connect();
        h.sockets[0].open();
        h.socket.close();
        vi.advanceTimersByTime(5000);
        expect(h.sockets.length).toBe(1);
    });

    it("tracks telemetry age against an injected clock", () => {
        let nowMs = 10_000;
        const h = makeHarness({ now: () => nowMs });
        h.socket.connect();
        h.sockets[0].open();
        expect(h.socket.timeSinceTelemetry()).toBeNull();
        expect(h.socket.isStale(1000)).toBe(false);

        h.sockets[0].emit(telemetryJson());
        nowMs += 500;
        expect(h.socket.timeSinceTelemetry()).toBe(500);
        expect(h.socket.isStale(1000)).toBe(false);

        nowMs += 1000;
        expect(h.socket.isStale(1000)).toBe(true);
    });

    it("is never stale while disconnected", () => {
        let nowMs = 0;
        const h = makeHarness({ now: () => nowMs });
        h.socket.connect();
        h.sockets[0].open();
        h.sockets[0].emit(telemetryJson());
        nowMs += 60_000;
        h.sockets[0].dropFromServer();
        expect(h.socket.isStale(1000)).toBe(false);
        expect(h.socket.timeSinceTelemetry()).toBeNull();
    });
});

describe("bridgeUrl", () => {
    it("derives ws and wss from the page location", () => {
        expect(bridgeUrl({ protocol: "http:", host: "localhost:8000" })).toBe(
            "ws://localhost:8000/ws",
        );
        expect(bridgeUrl({ protocol: "https:", host: "panel.example" })).toBe(
            "wss://panel.example/ws",
        );
    });
});
