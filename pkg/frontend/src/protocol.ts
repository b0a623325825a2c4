/**
 * JSON messages exchanged with the live bridge on /ws.
 *
 * Field names mirror the wire exactly. Incoming frames are validated
 * before use: a malformed frame parses to null and the caller counts it
 * as dropped instead of letting it reach the UI.
 */

export interface Hello {
    type: "hello";
    dt: number;
    duration: number;
    telemetry_hz: number;
    time_scale: number;
    v_ref_max: number;
    d_min_mm: number;
    d_safe_mm: number;
    f_min_hz: number;
    f_max_hz: number;
}

export interface ChannelCounters {
    sent: number;
    dropped: number;
}

export interface Telemetry {
    type: "telemetry";
    t: number;
    ref_pos: number;
    slave_pos: number;
    velocity: number;
    motor_drive: number;
    x: number;
    y: number;
    heading: number;
    distance_mm: number | null;
    haptic_hz: number;
    haptic_active: boolean;
    haptic_displacement_m: number;
    piezo_volts: number;
    channel: ChannelCounters;
    done: boolean;
}

export interface Pong {
    type: "pong";
}

export interface ErrorReply {
    type: "error";
    message: string;
}

export type ServerMessage = Hello | Telemetry | Pong | ErrorReply;

export interface ImpulseCommand {
    type: "impulse";
    magnitude: number;
}

export interface TurnCommand {
    type: "turn";
    omega: number;
}

export interface Ping {
    type: "ping";
}

export type ClientMessage = ImpulseCommand | TurnCommand | Ping;

const HELLO_NUMBERS = [
    "dt",
    "duration",
    "telemetry_hz",
    "time_scale",
    "v_ref_max",
    "d_min_mm",
    "d_safe_mm",
    "f_min_hz",
    "f_max_hz",
] as const;

const TELEMETRY_NUMBERS = [
    "t",
    "ref_pos",
    "slave_pos",
    "velocity",
    "motor_drive",
    "x",
    "y",
    "heading",
    "haptic_hz",
    "haptic_displacement_m",
    "piezo_volts",
] as const;

function isFiniteNumber(v: unknown): v is number {
    return typeof v === "number" && Number.isFinite(v);
}

function isRecord(v: unknown): v is Record<string, unknown> {
    return typeof v === "object" && v !== null && !Array.isArray(v);
}

function isChannelCounters(v: unknown): v is ChannelCounters {
    return isRecord(v) && isFiniteNumber(v.sent) && isFiniteNumber(v.dropped);
}

/** Parse one server frame; null means malformed (count it, never throw). */
export function parseServerMessage(raw: string): ServerMessage | null {
    let msg: unknown;
    try {
        msg = JSON.parse(raw);
    } catch {
        return null;
    }
    if (!isRecord(msg)) return null;
    switch (msg.type) {
        case "hello":
            return HELLO_NUMBERS.every((f) => isFiniteNumber(msg[f]))
                ? (msg as unknown as Hello)
                : null;
        case "telemetry": {
            const ok =
                TELEMETRY_NUMBERS.every((f) => isFiniteNumber(msg[f])) &&
                (msg.distance_mm === null || isFiniteNumber(msg.distance_mm)) &&
                typeof msg.haptic_active === "boolean" &&
                typeof msg.done === "boolean" &&
                isChannelCounters(msg.channel);
            return ok ? (msg as unknown as Telemetry) : null;
        }
        case "pong":
            return { type: "pong" };
        case "error":
            return typeof msg.message === "string"
                ? { type: "error", message: msg.message }
                : null;
        default:
            return null;
    }
}

export function clamp(v: number, lo: number, hi: number): number {
    // Non-finite input collapses to the neutral value instead of NaN.
    if (!Number.isFinite(v)) v = 0;
    return Math.min(hi, Math.max(lo, v));
}

/** Build an impulse command; magnitude is clamped to [-1, 1]. */
export function impulseCommand(magnitude: number): ImpulseCommand {
    return { type: "impulse", magnitude: clamp(magnitude, -1, 1) };
}

/** Build a turn command; omega is clamped to [-1, 1]. */
export function turnCommand(omega: number): TurnCommand {
    return { type: "turn", omega: clamp(omega, -1, 1) };
}

export function pingCommand(): Ping {
    return { type: "ping" };
}
