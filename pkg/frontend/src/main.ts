/**
 * Operator console entry point: wires the WebSocket session to the
 * strip chart, gauges, haptic indicator, and keyboard/pointer input.
 * All state shown here is a view of server telemetry; nothing is
 * simulated locally.
 */

import { TraceBuffer, drawStripChart } from "./chart.js";
import { AudioBuzz, bandFraction, pulsePeriodMs } from "./haptics.js";
import {
    chargeFraction,
    driveDirection,
    impulseMagnitude,
    stripMagnitude,
    turnDirection,
} from "./input.js";
import { bridgeUrl, ConsoleSocket } from "./net.js";
import { Hello, impulseCommand, pingCommand, Telemetry, turnCommand } from "./protocol.js";

const STALE_AFTER_MS = 1000;
const PING_EVERY_MS = 5000;

function fmt(v: number, digits: number): string {
    return v.toFixed(digits);
}

function init(): void {
    const connBadge = document.getElementById("connBadge") as HTMLElement;
    const staleBadge = document.getElementById("staleBadge") as HTMLElement;
    const doneBadge = document.getElementById("doneBadge") as HTMLElement;
    const rttVal = document.getElementById("rttVal") as HTMLElement;
    const droppedVal = document.getElementById("droppedVal") as HTMLElement;
    const channelVal = document.getElementById("channelVal") as HTMLElement;
    const canvas = document.getElementById("chartCanvas") as HTMLCanvasElement;
    const tVal = document.getElementById("tVal") as HTMLElement;
    const refVal = document.getElementById("refVal") as HTMLElement;
    const posVal = document.getElementById("posVal") as HTMLElement;
    const headingVal = document.getElementById("headingVal") as HTMLElement;
    const distFill = document.getElementById("distFill") as HTMLElement;
    const distVal = document.getElementById("distVal") as HTMLElement;
    const hapticDot = document.getElementById("hapticDot") as HTMLElement;
    const hapticHzVal = document.getElementById("hapticHzVal") as HTMLElement;
    const hapticFill = document.getElementById("hapticFill") as HTMLElement;
    const audioToggle = document.getElementById("audioToggle") as HTMLButtonElement;
    const tapStrip = document.getElementById("tapStrip") as HTMLElement;
    const tapMarker = document.getElementById("tapMarker") as HTMLElement;
    const chargeFill = document.getElementById("chargeFill") as HTMLElement;
    const chargeLabel = document.getElementById("chargeLabel") as HTMLElement;
    const inputPanel = document.getElementById("inputPanel") as HTMLElement;
    const messageLine = document.getElementById("messageLine") as HTMLElement;

    const ctx = canvas.getContext("2d") as CanvasRenderingContext2D;
    const buf = new TraceBuffer(20);
    const buzz = new AudioBuzz();
    const socket = new ConsoleSocket(bridgeUrl(window.location));

    let hello: Hello | null = null;
    let done = false;
    let pingSentAt: number | null = null;

    // Hold-to-charge impulse state.
    let chargeStart: number | null = null;
    let chargeDir = 0;
    const turnKeysDown = new Set<number>();

    function inputsEnabled(): boolean {
        return socket.connected && !done;
    }

    function setStatus(connected: boolean): void {
        connBadge.textContent = connected ? "connected" : "disconnected";
        connBadge.className = connected ? "badge ok" : "badge bad";
        inputPanel.classList.toggle("disabled", !connected || done);
        if (!connected) {
            chargeStart = null;
            chargeDir = 0;
            turnKeysDown.clear();
            staleBadge.hidden = true;
        }
    }

    function showMessage(text: string): void {
        messageLine.textContent = text;
    }

    function sendTurn(): void {
        let omega = 0;
        for (const dir of turnKeysDown) omega += dir;
        socket.send(turnCommand(Math.sign(omega)));
    }

    function fireImpulse(magnitude: number): void {
        if (!inputsEnabled() || magnitude === 0) return;
        socket.send(impulseCommand(magnitude));
    }

    function onHello(msg: Hello): void {
        hello = msg;
        buf.clear();
        showMessage(
            `session: dt ${msg.dt * 1000} ms, ${msg.duration} s at ${msg.time_scale}x, ` +
                `haptics ${msg.f_min_hz}-${msg.f_max_hz} Hz`,
        );
    }

    function onTelemetry(msg: Telemetry): void {
        tVal.textContent = fmt(msg.t, 2) + " s";
        refVal.textContent = fmt(msg.ref_pos, 3) + " m";
        posVal.textContent = fmt(msg.slave_pos, 3) + " m";
        headingVal.textContent = fmt((msg.heading * 180) / Math.PI, 0) + "°";

        buf.push(msg.t, msg.ref_pos, msg.slave_pos);
        drawStripChart(ctx, buf);

        const dMin = hello?.d_min_mm ?? 20;
        const dSafe = hello?.d_safe_mm ?? 1000;
        if (msg.distance_mm === null) {
            distVal.textContent = "--";
            distFill.style.width = "0%";
            distFill.className = "fill";
        } else {
            const threat = Math.min(1, Math.max(0, (dSafe - msg.distance_mm) / (dSafe - dMin)));
            distVal.textContent = Math.round(msg.distance_mm) + " mm";
            distFill.style.width = (threat * 100).toFixed(1) + "%";
            distFill.className = threat > 0.7 ? "fill hot" : threat > 0 ? "fill warm" : "fill";
        }

        const fMin = hello?.f_min_hz ?? 50;
        const fMax = hello?.f_max_hz ?? 300;
        if (msg.haptic_active) {
            hapticHzVal.textContent = Math.round(msg.haptic_hz) + " Hz";
            hapticDot.classList.add("active");
            hapticDot.style.animationDuration = pulsePeriodMs(msg.haptic_hz).toFixed(2) + "ms";
            hapticFill.style.width = (bandFraction(msg.haptic_hz, fMin, fMax) * 100).toFixed(1) + "%";
        } else {
            hapticHzVal.textContent = "quiet";
            hapticDot.classList.remove("active");
            hapticFill.style.width = "0%";
        }
        buzz.update(msg.haptic_hz, msg.haptic_active);

        channelVal.textContent = `${msg.channel.sent} sent / ${msg.channel.dropped} lost`;
        droppedVal.textContent = String(socket.dropped);

        if (msg.done && !done) {
            done = true;
            doneBadge.hidden = false;
            inputPanel.classList.add("disabled");
        }
    }

    socket.onStatus = setStatus;
    socket.onMessage = (msg) => {
        switch (msg.type) {
            case "hello":
                onHello(msg);
                break;
            case "telemetry":
                onTelemetry(msg);
                break;
            case "pong":
                if (pingSentAt !== null) {
                    rttVal.textContent = Math.max(1, Math.round(Date.now() - pingSentAt)) + " ms";
                    pingSentAt = null;
                }
                break;
            case "error":
                showMessage("server: " + msg.message);
                break;
        }
    };

    window.addEventListener("keydown", (event) => {
        if (event.repeat || !inputsEnabled()) return;
        const drive = driveDirection(event.key);
        if (drive !== 0 && chargeStart === null) {
            chargeStart = performance.now();
            chargeDir = drive;
            chargeLabel.textContent = drive > 0 ? "forward" : "reverse";
            event.preventDefault();
            return;
        }
        const turn = turnDirection(event.key);
        if (turn !== 0 && !turnKeysDown.has(turn)) {
            turnKeysDown.add(turn);
            sendTurn();
            event.preventDefault();
        }
    });

    window.addEventListener("keyup", (event) => {
        const drive = driveDirection(event.key);
        if (drive !== 0 && chargeStart !== null && drive === chargeDir) {
            const held = performance.now() - chargeStart;
            fireImpulse(chargeDir * impulseMagnitude(held));
            chargeStart = null;
            chargeDir = 0;
            return;
        }
        const turn = turnDirection(event.key);
        if (turn !== 0 && turnKeysDown.delete(turn)) sendTurn();
    });

    tapStrip.addEventListener("pointerdown", (event) => {
        const rect = tapStrip.getBoundingClientRect();
        const magnitude = stripMagnitude(event.clientX - rect.left, rect.width);
        fireImpulse(magnitude);
        tapMarker.style.left = (((event.clientX - rect.left) / rect.width) * 100).toFixed(1) + "%";
        tapMarker.classList.remove("flash");
        void tapMarker.offsetWidth; // restart the flash animation
        tapMarker.classList.add("flash");
    });

    audioToggle.addEventListener("click", () => {
        const on = buzz.toggle();
        audioToggle.textContent = on ? "buzz: on" : "buzz: off";
    });

    setInterval(() => {
        staleBadge.hidden = !socket.isStale(STALE_AFTER_MS);
        if (chargeStart !== null) {
            chargeFill.style.width = (chargeFraction(performance.now() - chargeStart) * 100).toFixed(1) + "%";
        } else {
            chargeFill.style.width = "0%";
            chargeLabel.textContent = "";
        }
    }, 100);

    setInterval(() => {
        if (socket.connected) {
            pingSentAt = Date.now();
            socket.send(pingCommand());
        } else {
            rttVal.textContent = "--";
        }
    }, PING_EVERY_MS);

    setStatus(false);
    socket.connect();
}

document.addEventListener("DOMContentLoaded", init);
