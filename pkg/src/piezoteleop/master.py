"""Handheld master logic.

Detected voltage pulses become drive commands, commands integrate into a
reference position, and incoming threat reports map to haptic waveforms
whose frequency rises linearly as the obstacle closes in.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .channel import DriveCommand, ThreatReport
from .errors import ConfigError
from .piezo import HapticWaveform, PiezoPlateParams, SensedPulse


@dataclass(frozen=True)
class MasterCalibration:
    """Tuning of the pulse -> command and threat -> haptic mappings."""

    threshold: float = 0.1  # V, pulse detection
    v_full_scale: float = 0.5  # V mapped to speed_level 255
    v_ref_max: float = 0.5  # m/s reference slew at full speed
    hold_timeout: float = 0.5  # s a command persists without a successor
    heartbeat_period: float = 0.1  # s between keepalive frames
    d_min: float = 20.0  # mm, maximal threat distance
    d_safe: float = 1000.0  # mm, no threat at or beyond
    f_min: float = 50.0  # Hz haptic band
    f_max: float = 300.0
    feedback_period: float = 0.06  # s, duration of one rendered waveform

    def __post_init__(self):
        if not self.threshold > 0:
            raise ConfigError("master.threshold", "must be > 0")
        if not self.v_full_scale > 0:
            raise ConfigError("master.v_full_scale", "must be > 0")
        if not self.v_ref_max > 0:
            raise ConfigError("master.v_ref_max", "must be > 0")
        if not self.hold_timeout > 0:
            raise ConfigError("master.hold_timeout", "must be > 0")
        if not self.heartbeat_period > 0:
            raise ConfigError("master.heartbeat_period", "must be > 0")
        if not self.d_min < self.d_safe:
            raise ConfigError("master.d_min", "must be < d_safe")
        if not 0 < self.f_min < self.f_max:
            raise ConfigError("master.f_min", "need 0 < f_min < f_max")
        if not self.feedback_period > 0:
            raise ConfigError("master.feedback_period", "must be > 0")


@dataclass(frozen=True)
class ReferenceState:
    ref_position: float = 0.0
    last_command_time: float = 0.0


def classify_command(pulse: SensedPulse, calibration: MasterCalibration, seq: int = 0) -> DriveCommand:
    """Map a sensed pulse to a drive command.

    Direction follows the pulse sign; speed scales linearly with |v_peak|
    up to v_full_scale, clamped into 1..255 so an above-threshold pulse is
    never a null command.
    """
    direction = 1 if pulse.v_peak > 0 else -1
    scaled = 255.0 * abs(pulse.v_peak) / calibration.v_full_scale
    speed = int(min(max(int(scaled + 0.5), 1), 255))
    return DriveCommand(direction=direction, speed_level=speed, seq=seq)


def command_rate(cmd: DriveCommand, calibration: MasterCalibration) -> float:
    """Reference slew (m/s) while a command is active."""
    return cmd.direction * (cmd.speed_level / 255.0) * calibration.v_ref_max


def integrate_reference(
    state: ReferenceState, cmd: DriveCommand, calibration: MasterCalibration, dt: float
) -> ReferenceState:
    """Advance the reference one tick under the active command."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    return replace(state, ref_position=state.ref_position + command_rate(cmd, calibration) * dt)


def threat_to_intensity(report: ThreatReport, d_min: float, d_safe: float) -> float:
    """Normalized threat in [0, 1]: 0 at or beyond d_safe, 1 at d_min."""
    if not d_min < d_safe:
        raise ConfigError("master.d_min", "must be < d_safe")
    return min(max((d_safe - report.distance_mm) / (d_safe - d_min), 0.0), 1.0)


def intensity_to_frequency(intensity: float, f_min: float, f_max: float) -> float:
    return f_min + intensity * (f_max - f_min)


def render_haptic(
    intensity: float,
    band: tuple[float, float],
    plate: PiezoPlateParams,
    feedback_period: float,
) -> HapticWaveform | None:
    """Waveform for a threat intensity; None when there is nothing to render.

    Frequency maps linearly across the band, amplitude is the full drive
    voltage, duration is one feedback period.
    """
    f_min, f_max = band
    if not f_min < f_max:
        raise ConfigError("master.f_min", "need f_min < f_max")
    if not 0.0 <= intensity <= 1.0:
        raise ValueError(f"intensity {intensity} outside [0, 1]")
    if intensity == 0.0:
        return None
    return HapticWaveform(
        frequency=intensity_to_frequency(intensity, f_min, f_max),
        amplitude=plate.max_drive_voltage,
        duration=feedback_period,
    )
