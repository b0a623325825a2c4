"""UGV firmware model: PD position servo, first-order motor, kinematics,
and the ultrasonic threat measurement.

Motion is 1-DOF longitudinal; `position` is the signed odometer driven by
the servo. The planar pose (x, y, heading) tracks it for the world query
and only diverges from the odometer when the optional turn extension is
used (heading fixed otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import ThreatReport
from .world import UltrasonicParams, WorldModel, raycast_cone


@dataclass(frozen=True)
class PdGains:
    kp: float = 8.0  # per meter
    kd: float = 2.0  # seconds per meter

    def __post_init__(self):
        if not self.kp > 0:
            raise ValueError("kp must be > 0")
        if self.kd < 0:
            raise ValueError("kd must be >= 0")


@dataclass(frozen=True)
class MotorParams:
    """First-order drive train: velocity relaxes toward drive*v_max."""

    v_max: float = 0.5  # m/s
    tau: float = 0.2  # s
    turn_rate_max: float = 1.5  # rad/s at full turn command (extension)

    def __post_init__(self):
        if not self.v_max > 0:
            raise ValueError("v_max must be > 0")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if self.turn_rate_max < 0:
            raise ValueError("turn_rate_max must be >= 0")


@dataclass(frozen=True)
class UgvState:
    position: float = 0.0  # m, odometer along the driven axis
    heading: float = 0.0  # rad
    velocity: float = 0.0  # m/s
    motor_drive: float = 0.0  # in [-1, 1]
    x: float = 0.0  # m, planar pose for the world query
    y: float = 0.0


def pd_control(
    ref_pos: float,
    state: UgvState,
    prev_error: float | None,
    gains: PdGains,
    dt: float,
) -> tuple[float, float]:
    """One PD tick: returns (motor_drive clamped to [-1, 1], new error).

    Derivative is a backward difference on the error; passing
    prev_error=None (first tick) zeroes the derivative kick.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    e = ref_pos - state.position
    if prev_error is None:
        prev_error = e
    u = gains.kp * e + gains.kd * (e - prev_error) / dt
    return min(max(u, -1.0), 1.0), e


def ugv_step(
    state: UgvState,
    motor_drive: float,
    motor: MotorParams,
    dt: float,
    turn_cmd: float = 0.0,
) -> UgvState:
    """Semi-implicit Euler tick of motor and kinematics."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    vel = state.velocity + dt * (motor_drive * motor.v_max - state.velocity) / motor.tau
    heading = state.heading + turn_cmd * motor.turn_rate_max * dt
    return replace(
        state,
        velocity=vel,
        heading=heading,
        position=state.position + dt * vel,
        x=state.x + dt * vel * math.cos(heading),
        y=state.y + dt * vel * math.sin(heading),
        motor_drive=motor_drive,
    )


def measure_ultrasonic(
    state: UgvState,
    world: WorldModel,
    sensor: UltrasonicParams,
    now: float = 0.0,
    seq: int = 0,
) -> ThreatReport:
    """Cone measurement along the vehicle heading, stamped with time and seq."""
    distance = raycast_cone((state.x, state.y), state.heading, sensor, world)
    return ThreatReport(distance_mm=int(round(distance)), seq=seq, t_measured=now)
