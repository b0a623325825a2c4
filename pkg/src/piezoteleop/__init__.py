"""Deterministic simulator and protocol stack for piezo self-sensing
bilateral teleoperation: a handheld master senses operator taps on a
piezo plate and renders haptic vibration, a simulated UGV servoes the
commanded position and reports obstacle threat back over a lossy link.
"""

from .accel import BACKEND, NUMBA_ENABLED
from .channel import (
    Ack,
    Channel,
    ChannelConfig,
    DriveCommand,
    Heartbeat,
    ThreatReport,
    conformance_vectors,
    crc8,
    decode_frame,
    encode_frame,
)
from .config import ScenarioConfig, load_scenario, scenario_from_dict
from .errors import (
    ConfigError,
    DomainError,
    FrameError,
    FramingError,
    IntegrityError,
    OutOfModelError,
    ProtocolError,
)
from .harness import RunMetrics, emit_metrics, run_scenario
from .master import (
    MasterCalibration,
    ReferenceState,
    classify_command,
    integrate_reference,
    intensity_to_frequency,
    render_haptic,
    threat_to_intensity,
)
from .piezo import (
    ForceProfile,
    HapticWaveform,
    PiezoPlateParams,
    SensedPulse,
    detect_pulse,
    simulate_actuate,
    simulate_sense,
)
from .sim import Simulation
from .slave import MotorParams, PdGains, UgvState, measure_ultrasonic, pd_control, ugv_step
from .world import UltrasonicParams, WorldModel, raycast_cone

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "NUMBA_ENABLED",
    "Ack",
    "Channel",
    "ChannelConfig",
    "ConfigError",
    "DomainError",
    "DriveCommand",
    "ForceProfile",
    "FrameError",
    "FramingError",
    "HapticWaveform",
    "Heartbeat",
    "IntegrityError",
    "MasterCalibration",
    "MotorParams",
    "OutOfModelError",
    "PdGains",
    "PiezoPlateParams",
    "ProtocolError",
    "ReferenceState",
    "RunMetrics",
    "ScenarioConfig",
    "SensedPulse",
    "Simulation",
    "ThreatReport",
    "UgvState",
    "UltrasonicParams",
    "WorldModel",
    "classify_command",
    "conformance_vectors",
    "crc8",
    "decode_frame",
    "detect_pulse",
    "emit_metrics",
    "encode_frame",
    "integrate_reference",
    "intensity_to_frequency",
    "load_scenario",
    "measure_ultrasonic",
    "pd_control",
    "raycast_cone",
    "render_haptic",
    "run_scenario",
    "scenario_from_dict",
    "simulate_actuate",
    "simulate_sense",
    "threat_to_intensity",
    "ugv_step",
    "__version__",
]
