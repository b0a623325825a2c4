"""Tick-stepped simulation binding master, channel, slave, and world.

All modules share one integer tick clock (t = k * dt). Within a tick the
event order is fixed and normative for reproducibility:

  1. haptic waveform expiry
  2. scripted reference steps (test hook: sets both nodes' references)
  3. master sensing on force-active ticks: voltage recurrence, threshold
     detector, command classification and send
  4. master heartbeat
  5. master command hold timeout
  6. master->slave deliveries: commands update the slave's rate and are
     answered with an Ack plus a freshly measured threat report
  7. slave command hold timeout
  8. continuous dynamics (reference integration, PD servo, motor,
     kinematics, piezo leakage) via the span kernel
  9. periodic ultrasonic measurement (post-servo pose)
 10. slave->master deliveries: Acks feed latency/RTT correlation; threat
     reports update the haptic output (waveform, or silence at zero
     intensity) and complete pending loop-latency events
 11. time-series recording

Runs of ticks containing no event at all are executed in one call to the
compiled span kernel, which reproduces steps 8 and 11 exactly, so the
numeric trajectory does not depend on how the run is chunked.

Loop latency is counted from the pulse-detection tick to the tick the
master processes the threat report correlated with that command (via the
slave's Ack) and updates its haptic output; with an obstacle inside the
safe distance that update is an actual waveform issue. Wall-clock time
between the same two instants is recorded separately; it measures compute
cost and is excluded from all determinism guarantees.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .channel import Ack, Channel, DriveCommand, Heartbeat, ThreatReport
from .config import FULL_SCALE_FORCE, ScenarioConfig
from .errors import ConfigError
from .kernels import servo_span
from .master import classify_command, command_rate, render_haptic, threat_to_intensity
from .piezo import SensedPulse, simulate_actuate
from .slave import UgvState, measure_ultrasonic

_U16 = 0x10000


@dataclass
class _TapSegment:
    """Live-injected force contribution starting at tick k0."""

    k0: int
    values: np.ndarray

    @property
    def end(self) -> int:
        return self.k0 + len(self.values)


def tap_profile(force: float, hold_ticks: int, release_ticks: int) -> np.ndarray:
    """Per-tick force values of one operator tap: single-tick rise, flat
    hold, half-cosine release down to exactly zero. The smooth release
    keeps the sensing undershoot below the detection threshold for
    full-scale taps (a hard release would fire a spurious reverse pulse).
    """
    values = np.full(hold_ticks + release_ticks, force, dtype=np.float64)
    if release_ticks > 0:
        j = np.arange(1, release_ticks + 1, dtype=np.float64)
        values[hold_ticks:] = force * 0.5 * (1.0 + np.cos(math.pi * j / release_ticks))
        values[-1] = 0.0
    return values


def build_force_array(cfg: ScenarioConfig) -> np.ndarray:
    forces = np.zeros(cfg.ticks, dtype=np.float64)
    for imp in cfg.script.impulses:
        k0 = round(imp.t / cfg.dt)
        seg = tap_profile(imp.force, round(imp.hold / cfg.dt), round(imp.release / cfg.dt))
        stop = min(cfg.ticks, k0 + len(seg))
        forces[k0:stop] += seg[: stop - k0]
    return forces


class Simulation:
    """One scenario instance. ``run()`` steps scripted scenarios to the
    end; live mode advances in chunks via ``step_to``/``step_chunk`` with
    impulse/turn injection between chunks (all mutation stays on the
    caller's thread; see the live bridge for the queueing contract).
    """

    def __init__(self, cfg: ScenarioConfig, record: bool | None = None):
        self.cfg = cfg
        self.dt = cfg.dt
        self.ticks = cfg.ticks
        self._eps = cfg.dt * 1e-6

        self._gain = cfg.plate.sense_gain
        self._decay = cfg.plate.decay_per_tick(cfg.dt)
        self._hb_ticks = cfg.heartbeat_ticks
        self._meas_ticks = cfg.measure_ticks
        self._hold_ticks = cfg.hold_ticks
        self._fb_ticks = cfg.feedback_ticks

        m2s_seed, s2m_seed = cfg.channel_seeds()
        self.m2s = Channel(cfg.channel, seed=m2s_seed)
        self.s2m = Channel(cfg.channel, seed=s2m_seed)

        # Operator input: scripted runs precompute the whole force trace,
        # live runs accumulate tap segments as they are injected.
        if cfg.mode == "scripted":
            self._forces = build_force_array(cfg)
            deltas = np.diff(self._forces, prepend=self._forces[0] if cfg.ticks else 0.0)
            self._active_ticks = np.flatnonzero(deltas != 0.0)
        else:
            self._forces = None
            self._active_ticks = np.empty(0, dtype=np.int64)
        self._active_ptr = 0
        self._segments: list[_TapSegment] = []

        self._step_map: dict[int, float] = {
            round(st.t / cfg.dt): st.ref for st in cfg.script.reference_steps
        }

        # Master state.
        self._v = 0.0
        self._f_prev = 0.0
        self._armed = True
        self._ref_m = 0.0
        self._rate_m = 0.0
        self._last_cmd_m = 0
        self._mseq = 0
        self._haptic_hz = 0.0
        self._haptic_disp = 0.0
        self._haptic_expiry: int | None = None
        self._distance_mm = math.nan

        # Slave state.
        self._ref_s = 0.0
        self._rate_s = 0.0
        self._last_cmd_s = 0
        self._sseq = 0
        self._pos = 0.0
        self._x = 0.0
        self._y = 0.0
        self._heading = 0.0
        self._vel = 0.0
        self._drive = 0.0
        self._prev_err = 0.0
        self._have_prev = False
        self._turn_norm = 0.0

        # Loop-latency correlation: command seq -> (detect tick, wall t0)
        # while un-acked, then FIFO until the next threat report lands.
        self._pending_lat: dict[int, tuple[int, float]] = {}
        self._acked_lat: list[tuple[int, float]] = []
        self.latencies_sim: list[float] = []
        self.latencies_wall: list[float] = []
        self._hb_sent: dict[int, float] = {}
        self.heartbeat_rtt: list[float] = []
        self.haptic_issues = 0

        self._record = cfg.mode == "scripted" if record is None else record
        if self._record:
            rows = (cfg.ticks - 1) // cfg.record_every + 1 if cfg.ticks else 0
            self._rec_t = np.empty(rows)
            self._rec_ref = np.empty(rows)
            self._rec_pos = np.empty(rows)
            self._rec_drive = np.empty(rows)
            self._rec_dist = np.empty(rows)
            self._rec_hz = np.empty(rows)
        else:
            empty = np.empty(0)
            self._rec_t = self._rec_ref = self._rec_pos = empty
            self._rec_drive = self._rec_dist = self._rec_hz = empty
        self._rec_idx = 0
        self._k = 0

    # -- sequence numbers (one monotone counter per node, u16 wrap) ------

    def _next_mseq(self) -> int:
        seq = self._mseq % _U16
        self._mseq += 1
        return seq

    def _next_sseq(self) -> int:
        seq = self._sseq % _U16
        self._sseq += 1
        return seq

    # -- operator input ---------------------------------------------------

    def inject_impulse(self, magnitude: float) -> None:
        """Live-mode tap: signed magnitude in [-1, 1], full scale maps to
        the force that saturates speed_level. Takes effect next tick."""
        if not math.isfinite(magnitude) or magnitude == 0.0:
            return
        magnitude = min(1.0, max(-1.0, magnitude))
        hold = round(0.005 / self.dt)
        release = round(0.010 / self.dt)
        seg = tap_profile(magnitude * FULL_SCALE_FORCE, max(1, hold), release)
        self._segments.append(_TapSegment(k0=max(self._k, 1), values=seg))

    def set_turn(self, omega_norm: float) -> None:
        """Live-mode turn extension, applied directly to the vehicle
        (the wire format carries no turn frame)."""
        if math.isfinite(omega_norm):
            self._turn_norm = min(1.0, max(-1.0, omega_norm))

    def _force_at(self, k: int) -> float:
        if self._forces is not None:
            return float(self._forces[k])
        total = 0.0
        for seg in self._segments:
            if seg.k0 <= k < seg.end:
                total += seg.values[k - seg.k0]
        return total

    def _force_active(self, k: int) -> bool:
        if self._forces is not None:
            p = self._active_ptr
            arr = self._active_ticks
            return p < len(arr) and arr[p] == k
        return any(seg.k0 <= k <= seg.end for seg in self._segments)

    def _next_force_tick(self, k: int) -> int:
        if self._forces is not None:
            arr = self._active_ticks
            p = self._active_ptr
            while p < len(arr) and arr[p] < k:
                p += 1
            self._active_ptr = p
            return int(arr[p]) if p < len(arr) else self.ticks
        self._segments = [s for s in self._segments if s.end >= k]
        nxt = self.ticks
        for seg in self._segments:
            nxt = min(nxt, seg.k0 if k < seg.k0 else k)
        return nxt

    # -- stepping ---------------------------------------------------------

    def run(self) -> None:
        self.step_to(self.ticks)

    def step_chunk(self, n: int) -> None:
        self.step_to(min(self.ticks, self._k + n))

    @property
    def tick(self) -> int:
        return self._k

    @property
    def done(self) -> bool:
        return self._k >= self.ticks

    def step_to(self, k_target: int) -> None:
        while self._k < k_target:
            nxt = min(self._next_event_tick(), k_target)
            if nxt > self._k:
                self._run_span(nxt - self._k, record_in_kernel=True)
            else:
                self._tick_event()

    def _delivery_tick(self, ch: Channel) -> int:
        at = ch.next_delivery()
        if at is None:
            return self.ticks
        return max(self._k, math.ceil((at - self._eps) / self.dt))

    @staticmethod
    def _next_multiple(k: int, period: int) -> int:
        m = (k // period) * period
        return m if m >= k else m + period

    def _next_event_tick(self) -> int:
        k = self._k
        nxt = min(
            self.ticks,
            self._next_force_tick(k),
            self._next_multiple(k, self._hb_ticks),
            self._next_multiple(k, self._meas_ticks),
            self._delivery_tick(self.m2s),
            self._delivery_tick(self.s2m),
        )
        if self._rate_m != 0.0:
            nxt = min(nxt, self._last_cmd_m + self._hold_ticks)
        if self._rate_s != 0.0:
            nxt = min(nxt, self._last_cmd_s + self._hold_ticks)
        if self._haptic_expiry is not None:
            nxt = min(nxt, self._haptic_expiry)
        if self._step_map:
            ahead = [kk for kk in self._step_map if kk >= k]
            if ahead:
                nxt = min(nxt, min(ahead))
        return nxt

    def _run_span(self, n: int, sensed: bool = False, record_in_kernel: bool = False) -> None:
        # Eventful ticks record in Python after deliveries (step 11); only
        # quiet spans record inside the kernel.
        rec_every = self.cfg.record_every if (self._record and record_in_kernel) else 0
        out = servo_span(
            n,
            self._k,
            self.dt,
            self._v,
            1.0 if sensed else self._decay,
            self._ref_m,
            self._rate_m,
            self._ref_s,
            self._rate_s,
            self._prev_err,
            self._have_prev,
            self.cfg.gains.kp,
            self.cfg.gains.kd,
            self._pos,
            self._x,
            self._y,
            self._heading,
            self._turn_norm * self.cfg.motor.turn_rate_max,
            self._vel,
            self._drive,
            self.cfg.motor.v_max,
            self.cfg.motor.tau,
            rec_every,
            self._rec_idx,
            self._rec_t,
            self._rec_ref,
            self._rec_pos,
            self._rec_drive,
            self._rec_dist,
            self._rec_hz,
            self._distance_mm,
            self._haptic_hz,
        )
        (
            self._v,
            self._ref_m,
            self._ref_s,
            self._prev_err,
            self._have_prev,
            self._pos,
            self._x,
            self._y,
            self._heading,
            self._vel,
            self._drive,
            rec_idx,
        ) = out
        self._have_prev = bool(self._have_prev)
        self._rec_idx = int(rec_idx)
        self._k += n

    def _slave_state(self) -> UgvState:
        return UgvState(
            position=self._pos,
            heading=self._heading,
            velocity=self._vel,
            motor_drive=self._drive,
            x=self._x,
            y=self._y,
        )

    def _tick_event(self) -> None:
        cfg = self.cfg
        cal = cfg.master
        k = self._k
        t = k * self.dt

        # 1. haptic expiry
        if self._haptic_expiry is not None and k >= self._haptic_expiry:
            self._haptic_hz = 0.0
            self._haptic_disp = 0.0
            self._haptic_expiry = None

        # 2. scripted reference steps (applied to both nodes)
        if k in self._step_map:
            ref = self._step_map.pop(k)
            self._ref_m = ref
            self._ref_s = ref

        # 3. master sensing
        sensed = False
        if self._force_active(k):
            sensed = True
            force = self._force_at(k)
            if abs(self._v) < cal.threshold:
                self._armed = True
            self._v = self._decay * self._v + self._gain * (force - self._f_prev)
            self._f_prev = force
            if self._armed and abs(self._v) >= cal.threshold:
                self._armed = False
                pulse = SensedPulse(t_peak=t, v_peak=self._v, duration=self.dt)
                cmd = classify_command(pulse, cal, seq=self._next_mseq())
                self._pending_lat[cmd.seq] = (k, time.perf_counter())
                self.m2s.send(cmd, t)
                self._rate_m = command_rate(cmd, cal)
                self._last_cmd_m = k

        # 4. heartbeat
        if k % self._hb_ticks == 0:
            seq = self._next_mseq()
            self._hb_sent[seq] = t
            self.m2s.send(Heartbeat(seq=seq), t)

        # 5. master hold timeout
        if self._rate_m != 0.0 and k - self._last_cmd_m >= self._hold_ticks:
            self._rate_m = 0.0

        # 6. master -> slave deliveries
        for msg in self.m2s.step(t, self._eps):
            if isinstance(msg, DriveCommand):
                self._rate_s = command_rate(msg, cal)
                self._last_cmd_s = k
                self.s2m.send(Ack(acked_seq=msg.seq, seq=self._next_sseq()), t)
                report = measure_ultrasonic(
                    self._slave_state(), cfg.world, cfg.ultrasonic,
                    now=t, seq=self._next_sseq(),
                )
                self.s2m.send(report, t)
            elif isinstance(msg, Heartbeat):
                self.s2m.send(Ack(acked_seq=msg.seq, seq=self._next_sseq()), t)
            # Acks / threat reports arriving here are protocol misuse; drop.

        # 7. slave hold timeout
        if self._rate_s != 0.0 and k - self._last_cmd_s >= self._hold_ticks:
            self._rate_s = 0.0

        # 8. dynamics (single tick; voltage already advanced when sensed)
        self._run_span(1, sensed=sensed)

        # 9. periodic measurement, post-servo pose
        if k % self._meas_ticks == 0:
            report = measure_ultrasonic(
                self._slave_state(), cfg.world, cfg.ultrasonic,
                now=t, seq=self._next_sseq(),
            )
            self.s2m.send(report, t)

        # 10. slave -> master deliveries
        for msg in self.s2m.step(t, self._eps):
            if isinstance(msg, Ack):
                if msg.acked_seq in self._pending_lat:
                    self._acked_lat.append(self._pending_lat.pop(msg.acked_seq))
                elif msg.acked_seq in self._hb_sent:
                    self.heartbeat_rtt.append(t - self._hb_sent.pop(msg.acked_seq))
            elif isinstance(msg, ThreatReport):
                self._distance_mm = float(msg.distance_mm)
                intensity = threat_to_intensity(msg, cal.d_min, cal.d_safe)
                waveform = render_haptic(
                    intensity, (cal.f_min, cal.f_max), cfg.plate, cal.feedback_period
                )
                if waveform is not None:
                    self._haptic_hz = waveform.frequency
                    self._haptic_disp = simulate_actuate(waveform, cfg.plate)
                    self._haptic_expiry = k + self._fb_ticks
                    self.haptic_issues += 1
                else:
                    self._haptic_hz = 0.0
                    self._haptic_disp = 0.0
                    self._haptic_expiry = None
                now_wall = time.perf_counter()
                for k0, wall0 in self._acked_lat:
                    self.latencies_sim.append((k - k0) * self.dt)
                    self.latencies_wall.append(now_wall - wall0)
                self._acked_lat.clear()

        # 11. record (after all of this tick's effects are visible)
        if self._record and k % cfg.record_every == 0:
            i = self._rec_idx
            self._rec_t[i] = k * self.dt
            self._rec_ref[i] = self._ref_m
            self._rec_pos[i] = self._pos
            self._rec_drive[i] = self._drive
            self._rec_dist[i] = self._distance_mm
            self._rec_hz[i] = self._haptic_hz
            self._rec_idx = i + 1

    # -- results ------------------------------------------------------------

    @property
    def incomplete_loops(self) -> int:
        return len(self._pending_lat) + len(self._acked_lat)

    def series(self) -> dict[str, np.ndarray]:
        n = self._rec_idx
        return {
            "t": self._rec_t[:n],
            "ref_pos": self._rec_ref[:n],
            "slave_pos": self._rec_pos[:n],
            "motor_drive": self._rec_drive[:n],
            "distance_mm": self._rec_dist[:n],
            "haptic_hz": self._rec_hz[:n],
        }

    def snapshot(self) -> dict:
        """Telemetry view for the live bridge (floats only; NaN distance
        is mapped to None so the payload stays strict JSON)."""
        return {
            "t": self._k * self.dt,
            "ref_pos": self._ref_m,
            "slave_pos": self._pos,
            "velocity": self._vel,
            "motor_drive": self._drive,
            "x": self._x,
            "y": self._y,
            "heading": self._heading,
            "distance_mm": None if math.isnan(self._distance_mm) else self._distance_mm,
            "haptic_hz": self._haptic_hz,
            "haptic_active": self._haptic_hz > 0.0,
            "haptic_displacement_m": self._haptic_disp,
            "piezo_volts": self._v,
            "channel": {
                "sent": self.m2s.stats.sent + self.s2m.stats.sent,
                "dropped": self.m2s.stats.dropped + self.s2m.stats.dropped,
            },
            "done": self.done,
        }


def make_simulation(cfg: ScenarioConfig) -> Simulation:
    if cfg.ticks < 1:
        raise ConfigError("duration", "must cover at least one tick")
    return Simulation(cfg)
