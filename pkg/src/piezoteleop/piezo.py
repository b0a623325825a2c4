"""Bi-functional piezo plate model.

Sensing (direct effect): a force impulse on the plate produces an
open-terminal voltage through a first-order leakage RC model,

    dV/dt = (d33/C) * dF/dt - V / (R_leak * C)

integrated explicitly per tick with V(0) = 0, so a force step of dF jumps
the voltage by d33*dF/C and then decays with time constant R_leak*C.

Actuation (inverse effect): below resonance the free displacement is the
quasi-static linear response x = d33 * V_drive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfModelError
from .kernels import rc_sense_trace


@dataclass(frozen=True)
class PiezoPlateParams:
    """Physical constants of one piezo plate."""

    d33: float  # charge constant, C/N (numerically also m/V)
    capacitance: float  # F
    leak_resistance: float  # ohm
    max_drive_voltage: float  # V
    free_resonance_hz: float  # Hz

    def __post_init__(self):
        for name in ("d33", "capacitance", "leak_resistance", "max_drive_voltage", "free_resonance_hz"):
            if not getattr(self, name) > 0:
                raise ValueError(f"PiezoPlateParams.{name} must be > 0")

    @property
    def sense_gain(self) -> float:
        """Voltage jump per newton of force step, d33/C."""
        return self.d33 / self.capacitance

    @property
    def leak_time_constant(self) -> float:
        return self.leak_resistance * self.capacitance

    def decay_per_tick(self, dt: float) -> float:
        """Multiplicative voltage survival factor per explicit-Euler tick."""
        return 1.0 - dt / self.leak_time_constant


@dataclass(frozen=True)
class ForceProfile:
    """Uniformly sampled signed force trace on the 1-DOF joystick axis."""

    times: np.ndarray
    forces: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        f = np.asarray(self.forces, dtype=np.float64)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "forces", f)
        if t.ndim != 1 or f.ndim != 1 or t.shape != f.shape:
            raise ValueError("times and forces must be 1-D arrays of equal length")
        if t.shape[0] < 2:
            raise ValueError("a force profile needs at least two samples")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(f)):
            raise ValueError("force profile samples must be finite")
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise ValueError("sample times must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-15):
            raise ValueError("force profile is not uniformly sampled")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @classmethod
    def from_forces(cls, forces, dt: float, t0: float = 0.0) -> "ForceProfile":
        forces = np.asarray(forces, dtype=np.float64)
        times = t0 + dt * np.arange(forces.shape[0])
        return cls(times, forces)


@dataclass(frozen=True)
class SensedPulse:
    """One detected operator impulse: sign encodes push direction."""

    t_peak: float
    v_peak: float  # signed, extremal voltage of the excursion
    duration: float  # above-threshold dwell time

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("pulse duration must be > 0")


@dataclass(frozen=True)
class HapticWaveform:
    """Drive waveform rendered on the plate for threat feedback."""

    frequency: float
    amplitude: float
    duration: float

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("waveform amplitude must be > 0")
        if not self.frequency > 0:
            raise ValueError("waveform frequency must be > 0")
        if not self.duration > 0:
            raise ValueError("waveform duration must be > 0")


def simulate_sense(profile: ForceProfile, plate: PiezoPlateParams, dt: float):
    """Open-terminal voltage trace of the plate under a force profile.

    Returns (times, volts) arrays aligned with the profile samples.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if not np.isclose(profile.dt, dt, rtol=1e-9, atol=1e-15):
        raise ValueError(
            f"profile sampled at {profile.dt}, expected simulation tick {dt}"
        )
    volts = rc_sense_trace(profile.forces, plate.sense_gain, plate.decay_per_tick(dt))
    return profile.times, volts


def detect_pulse(times, volts, threshold: float) -> SensedPulse | None:
    """First excursion of |V| above threshold, or None.

    v_peak is the extremal (largest |V|) sample inside the excursion and
    duration the above-threshold dwell time.
    """
    if not threshold > 0:
        raise ValueError("threshold must be > 0")
    times = np.asarray(times, dtype=np.float64)
    volts = np.asarray(volts, dtype=np.float64)
    if volts.shape[0] == 0:
        return None
    above = np.abs(volts) >= threshold
    if not above.any():
        return None
    start = int(np.argmax(above))
    after = np.nonzero(~above[start:])[0]
    stop = start + int(after[0]) if after.size else volts.shape[0]
    seg = volts[start:stop]
    peak_off = int(np.argmax(np.abs(seg)))
    dt = float(times[1] - times[0]) if times.shape[0] > 1 else 0.0
    return SensedPulse(
        t_peak=float(times[start + peak_off]),
        v_peak=float(seg[peak_off]),
        duration=(stop - start) * dt,
    )


def simulate_actuate(waveform: HapticWaveform, plate: PiezoPlateParams) -> float:
    """Free quasi-static displacement amplitude (m) for a drive waveform."""
    if waveform.amplitude > plate.max_drive_voltage:
        raise ValueError(
            f"amplitude {waveform.amplitude} V exceeds drive limit {plate.max_drive_voltage} V"
        )
    if waveform.frequency >= plate.free_resonance_hz:
        raise OutOfModelError(
            f"drive at {waveform.frequency} Hz is not quasi-static below the "
            f"{plate.free_resonance_hz} Hz free resonance"
        )
    return plate.d33 * waveform.amplitude
