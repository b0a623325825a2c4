"""Scenario configuration: JSON schema, validation, and derived tick counts.

Every section is optional and falls back to the defaults of its dataclass;
validation failures raise ConfigError carrying the offending field path.
Times are seconds, geometry meters, sensor distances millimeters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .channel import ChannelConfig
from .errors import ConfigError
from .master import MasterCalibration
from .piezo import PiezoPlateParams
from .slave import MotorParams, PdGains
from .world import UltrasonicParams, WorldModel

DEFAULT_PLATE = dict(
    d33=500e-12,
    capacitance=10e-9,
    leak_resistance=10e6,
    max_drive_voltage=150.0,
    free_resonance_hz=4000.0,
)

FULL_SCALE_FORCE = 10.0  # N impulse that defines v_full_scale by default


@dataclass(frozen=True)
class ImpulseEvent:
    """Scripted operator tap: force rises in one tick, holds, then falls
    along a half-cosine so the sensing undershoot stays sub-threshold."""

    t: float
    force: float
    hold: float = 0.005
    release: float = 0.010


@dataclass(frozen=True)
class ReferenceStep:
    """Direct reference setpoint applied to both nodes; test/calibration
    scripting that bypasses the piezo input path."""

    t: float
    ref: float


@dataclass(frozen=True)
class OperatorScript:
    impulses: tuple[ImpulseEvent, ...] = ()
    reference_steps: tuple[ReferenceStep, ...] = ()


@dataclass(frozen=True)
class LiveOptions:
    telemetry_hz: float = 30.0
    time_scale: float = 1.0

    def __post_init__(self):
        if not self.telemetry_hz > 0:
            raise ValueError("telemetry_hz must be > 0")
        if not self.time_scale > 0:
            raise ValueError("time_scale must be > 0")


@dataclass(frozen=True)
class ScenarioConfig:
    plate: PiezoPlateParams
    master: MasterCalibration
    gains: PdGains
    motor: MotorParams
    ultrasonic: UltrasonicParams
    channel: ChannelConfig
    world: WorldModel
    script: OperatorScript = OperatorScript()
    live: LiveOptions = LiveOptions()
    dt: float = 1e-4
    duration: float = 10.0
    seed: int = 0
    mode: str = "scripted"
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt", "must be > 0")
        if not self.duration > 0:
            raise ConfigError("duration", "must be > 0")
        ticks = self.duration / self.dt
        if abs(ticks - round(ticks)) > 1e-6:
            raise ConfigError("duration", f"must be a multiple of dt={self.dt}")
        if self.mode not in ("scripted", "live"):
            raise ConfigError("mode", f"must be 'scripted' or 'live', got {self.mode!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if self.record_every < 1:
            raise ConfigError("record_every", "must be >= 1")
        if self.master.f_max >= self.plate.free_resonance_hz:
            raise ConfigError(
                "master.f_max", "haptic band must stay below plate.free_resonance_hz"
            )
        for i, imp in enumerate(self.script.impulses):
            path = f"script.impulses[{i}]"
            # A force step at tick 0 is invisible: the voltage recurrence
            # differences against the previous sample, and sample -1 is
            # defined equal to sample 0. Require the rise at tick >= 1.
            if not (math.isfinite(imp.t) and 1 <= round(imp.t / self.dt) < self.ticks):
                raise ConfigError(f"{path}.t", "must land on a tick in [dt, duration)")
            if not math.isfinite(imp.force) or imp.force == 0:
                raise ConfigError(f"{path}.force", "must be finite and nonzero")
            if imp.hold < self.dt:
                raise ConfigError(f"{path}.hold", "must be at least one tick")
            if imp.release < 0:
                raise ConfigError(f"{path}.release", "must be >= 0")
        for i, step in enumerate(self.script.reference_steps):
            path = f"script.reference_steps[{i}]"
            if not (math.isfinite(step.t) and 0 <= round(step.t / self.dt) < self.ticks):
                raise ConfigError(f"{path}.t", "must land on a tick in [0, duration)")
            if not math.isfinite(step.ref):
                raise ConfigError(f"{path}.ref", "must be finite")

    # Tick-domain views; the simulator works on integer ticks throughout.
    @property
    def ticks(self) -> int:
        return round(self.duration / self.dt)

    def _period_ticks(self, seconds: float, name: str) -> int:
        n = round(seconds / self.dt)
        if n < 1:
            raise ConfigError(name, f"period {seconds} s is below one tick ({self.dt} s)")
        return n

    @property
    def heartbeat_ticks(self) -> int:
        return self._period_ticks(self.master.heartbeat_period, "master.heartbeat_period")

    @property
    def measure_ticks(self) -> int:
        return self._period_ticks(self.ultrasonic.period, "ultrasonic.period")

    @property
    def hold_ticks(self) -> int:
        return self._period_ticks(self.master.hold_timeout, "master.hold_timeout")

    @property
    def feedback_ticks(self) -> int:
        return self._period_ticks(self.master.feedback_period, "master.feedback_period")

    def channel_seeds(self) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
        base = self.channel.seed if self.channel.seed else self.seed
        m2s, s2m = np.random.SeedSequence(entropy=base).spawn(2)
        return m2s, s2m


def _build(cls, data: dict, path: str, defaults: dict | None = None):
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown field")
    kwargs = dict(defaults or {})
    kwargs.update(data)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _build_world(data, path: str) -> WorldModel:
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    unknown = set(data) - {"bounds", "segments"}
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown field")
    bounds = data.get("bounds", (-10.0, -10.0, 10.0, 10.0))
    segments = data.get("segments", [])
    try:
        return WorldModel(np.asarray(segments, dtype=np.float64).reshape(-1, 4), tuple(bounds))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _build_script(data, path: str) -> OperatorScript:
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    unknown = set(data) - {"impulses", "reference_steps"}
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown field")
    impulses = tuple(
        _build(ImpulseEvent, imp, f"{path}.impulses[{i}]")
        for i, imp in enumerate(data.get("impulses", []))
    )
    steps = tuple(
        _build(ReferenceStep, st, f"{path}.reference_steps[{i}]")
        for i, st in enumerate(data.get("reference_steps", []))
    )
    return OperatorScript(impulses=impulses, reference_steps=steps)


_TOP_LEVEL = {
    "plate", "master", "gains", "motor", "ultrasonic", "channel", "world",
    "script", "live", "dt", "duration", "seed", "mode", "record_every",
}


def scenario_from_dict(data: dict, seed_override: int | None = None) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "scenario must be a JSON object")
    unknown = set(data) - _TOP_LEVEL
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")

    plate = _build(PiezoPlateParams, data.get("plate", {}), "plate", DEFAULT_PLATE)
    master_data = dict(data.get("master", {}))
    if "v_full_scale" not in master_data:
        master_data["v_full_scale"] = plate.sense_gain * FULL_SCALE_FORCE
    master = _build(MasterCalibration, master_data, "master")
    gains = _build(PdGains, data.get("gains", {}), "gains")
    motor = _build(MotorParams, data.get("motor", {}), "motor")
    ultrasonic = _build(UltrasonicParams, data.get("ultrasonic", {}), "ultrasonic")
    chan = _build(ChannelConfig, data.get("channel", {}), "channel")
    world = _build_world(data.get("world", {}), "world")
    script = _build_script(data.get("script", {}), "script")
    live = _build(LiveOptions, data.get("live", {}), "live")

    scalars = {}
    for key in ("dt", "duration", "mode"):
        if key in data:
            scalars[key] = data[key]
    for key in ("seed", "record_every"):
        if key in data:
            value = data[key]
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(key, f"must be an integer, got {value!r}")
            scalars[key] = value
    if seed_override is not None:
        scalars["seed"] = seed_override

    return ScenarioConfig(
        plate=plate,
        master=master,
        gains=gains,
        motor=motor,
        ultrasonic=ultrasonic,
        channel=chan,
        world=world,
        script=script,
        live=live,
        **scalars,
    )


def load_scenario(path: str | Path, seed_override: int | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError("<file>", f"scenario file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON in {path}: {exc}")
    return scenario_from_dict(data, seed_override)
