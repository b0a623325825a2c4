"""Live-mode bridge: real-time simulation behind a WebSocket console API.

Protocol (JSON text frames on /ws):
  client -> server  {"type": "impulse", "magnitude": -1..1}
                    {"type": "turn", "omega": -1..1}
                    {"type": "ping"}
  server -> client  {"type": "hello", ...config summary...}   on connect
                    {"type": "telemetry", ...snapshot...}     at telemetry_hz
                    {"type": "pong"} / {"type": "error", "message": ...}

Threading contract: every simulation-state mutation happens on the single
session thread; WebSocket handlers only enqueue input events and read the
latest snapshot published under a lock. The console frontend is served
from frontend/dist when built; otherwise a minimal built-in page is used.
"""

from __future__ import annotations

import asyncio
import os
import queue
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .config import ScenarioConfig
from .sim import Simulation

FALLBACK_PAGE = """<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>piezoteleop console (fallback)</title>
<style>
 body { font-family: system-ui, sans-serif; margin: 2rem; max-width: 40rem; }
 #state { white-space: pre; font-family: monospace; background: #f4f4f4; padding: 1rem; }
 button { font-size: 1rem; margin-right: .5rem; padding: .4rem .8rem; }
</style></head><body>
<h1>Operator console (fallback page)</h1>
<p>The full console is not built; this page exercises the same protocol.
Build it with <code>npm run build</code> in <code>frontend/</code>.</p>
<p>
 <button onclick="impulse(-1)">&#8592; full reverse tap</button>
 <button onclick="impulse(-0.4)">&#8592; soft</button>
 <button onclick="impulse(0.4)">soft &#8594;</button>
 <button onclick="impulse(1)">full forward tap &#8594;</button>
</p>
<div id="state">connecting...</div>
<script>
 const ws = new WebSocket(`ws://${location.host}/ws`);
 const el = document.getElementById("state");
 ws.onmessage = (ev) => {
   const m = JSON.parse(ev.data);
   if (m.type === "telemetry") el.textContent = JSON.stringify(m, null, 2);
 };
 ws.onclose = () => { el.textContent = "disconnected"; };
 function impulse(mag) { ws.send(JSON.stringify({type: "impulse", magnitude: mag})); }
</script></body></html>
"""


class LiveSession:
    """Owns the simulation thread and the input/snapshot boundary."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.sim = Simulation(cfg)
        self.inbox: queue.Queue[tuple[str, float]] = queue.Queue()
        self._lock = threading.Lock()
        self._snapshot = self.sim.snapshot()
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._loop, name="sim-loop", daemon=True)

    def start(self) -> None:
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=5.0)

    def latest(self) -> dict:
        with self._lock:
            return dict(self._snapshot)

    def _drain_inbox(self) -> None:
        while True:
            try:
                kind, value = self.inbox.get_nowait()
            except queue.Empty:
                return
            if kind == "impulse":
                self.sim.inject_impulse(value)
            elif kind == "turn":
                self.sim.set_turn(value)

    def _loop(self) -> None:
        scale = self.cfg.live.time_scale
        dt = self.cfg.dt
        start = time.perf_counter()
        poll = min(0.25 / self.cfg.live.telemetry_hz, 0.005)
        while not self._stop.is_set():
            self._drain_inbox()
            if not self.sim.done:
                target_t = (time.perf_counter() - start) * scale
                target_k = min(self.sim.ticks, int(target_t / dt))
                if target_k > self.sim.tick:
                    self.sim.step_to(target_k)
            with self._lock:
                self._snapshot = self.sim.snapshot()
            self._stop.wait(poll)


def _console_dir() -> Path | None:
    override = os.environ.get("PIEZOTELEOP_CONSOLE_DIR")
    candidates = [Path(override)] if override else []
    candidates.append(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    for cand in candidates:
        if cand.is_dir() and (cand / "index.html").is_file():
            return cand
    return None


def create_app(cfg: ScenarioConfig) -> FastAPI:
    session = LiveSession(cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        session.start()
        broadcaster = asyncio.create_task(_broadcast_loop(app, session))
        yield
        broadcaster.cancel()
        session.stop()

    app = FastAPI(lifespan=lifespan)
    app.state.session = session
    app.state.clients = set()

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "tick": session.sim.tick}

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        app.state.clients.add(websocket)
        await websocket.send_json(_hello(cfg))
        try:
            while True:
                try:
                    msg = await websocket.receive_json()
                except ValueError:
                    await websocket.send_json(
                        {"type": "error", "message": "payload must be JSON"}
                    )
                    continue
                await _handle_client_message(websocket, session, msg)
        except WebSocketDisconnect:
            pass
        finally:
            app.state.clients.discard(websocket)
            if not app.state.clients:
                # No operator attached: re-center the turn command; drive
                # decays to neutral on its own via the hold timeout.
                session.inbox.put(("turn", 0.0))

    console = _console_dir()
    if console is not None:
        app.mount("/", StaticFiles(directory=console, html=True), name="console")
    else:
        @app.get("/")
        async def fallback_index():
            return HTMLResponse(FALLBACK_PAGE)

    return app


def _hello(cfg: ScenarioConfig) -> dict:
    return {
        "type": "hello",
        "dt": cfg.dt,
        "duration": cfg.duration,
        "telemetry_hz": cfg.live.telemetry_hz,
        "time_scale": cfg.live.time_scale,
        "v_ref_max": cfg.master.v_ref_max,
        "d_min_mm": cfg.master.d_min,
        "d_safe_mm": cfg.master.d_safe,
        "f_min_hz": cfg.master.f_min,
        "f_max_hz": cfg.master.f_max,
    }


async def _handle_client_message(websocket: WebSocket, session: LiveSession, msg) -> None:
    if not isinstance(msg, dict):
        await websocket.send_json({"type": "error", "message": "expected an object"})
        return
    kind = msg.get("type")
    if kind == "impulse":
        value = msg.get("magnitude")
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            session.inbox.put(("impulse", float(value)))
        else:
            await websocket.send_json({"type": "error", "message": "impulse needs numeric magnitude"})
    elif kind == "turn":
        value = msg.get("omega")
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            session.inbox.put(("turn", float(value)))
        else:
            await websocket.send_json({"type": "error", "message": "turn needs numeric omega"})
    elif kind == "ping":
        await websocket.send_json({"type": "pong"})
    else:
        await websocket.send_json({"type": "error", "message": f"unknown type {kind!r}"})


async def _broadcast_loop(app: FastAPI, session: LiveSession) -> None:
    period = 1.0 / session.cfg.live.telemetry_hz
    while True:
        await asyncio.sleep(period)
        clients = list(app.state.clients)
        if not clients:
            continue
        payload = {"type": "telemetry", **session.latest()}
        for ws in clients:
            try:
                await ws.send_json(payload)
            except Exception:
                app.state.clients.discard(ws)


def serve(cfg: ScenarioConfig, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    app = create_app(cfg)
    config = uvicorn.Config(app, host=host, port=port, log_level="warning")
    server = uvicorn.Server(config)
    try:
        server.run()
    except SystemExit as exc:  # uvicorn exits this way on bind failure
        raise RuntimeError(f"server failed to start on {host}:{port}") from exc
