"""Wire frame format and the seeded lossy-link model between master and slave.

Frame layout (little-endian), total length 6 + len:

    magic 0xA5 | msg_type | seq u16 | len u8 | payload[len] | crc8

crc8 uses polynomial 0x07, init 0x00, no reflection, no final xor, computed
over msg_type || seq || len || payload. Payloads:

    0x01 DriveCommand  direction i8, speed_level u8
    0x02 ThreatReport  distance_mm u16
    0x03 Heartbeat     (empty)
    0x04 Ack           acked seq u16
"""

from __future__ import annotations

import heapq
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FramingError, IntegrityError, ProtocolError

MAGIC = 0xA5

TYPE_DRIVE_COMMAND = 0x01
TYPE_THREAT_REPORT = 0x02
TYPE_HEARTBEAT = 0x03
TYPE_ACK = 0x04

# CRC-8, poly 0x07, table-driven.
_CRC_TABLE = []
for _byte in range(256):
    _crc = _byte
    for _ in range(8):
        _crc = ((_crc << 1) ^ 0x07) & 0xFF if _crc & 0x80 else (_crc << 1) & 0xFF
    _CRC_TABLE.append(_crc)


def crc8(data: bytes) -> int:
    crc = 0x00
    for b in data:
        crc = _CRC_TABLE[crc ^ b]
    return crc


assert crc8(b"123456789") == 0xF4


def _check_u16(value: int, what: str) -> int:
    if not 0 <= value <= 0xFFFF:
        raise ValueError(f"{what} {value} out of u16 range")
    return value


@dataclass(frozen=True)
class DriveCommand:
    """Classified operator impulse: direction in {-1, 0, +1}, speed 0..255."""

    direction: int
    speed_level: int
    seq: int = 0

    def __post_init__(self):
        if self.direction not in (-1, 0, 1):
            raise ValueError(f"direction must be -1, 0 or +1, got {self.direction}")
        if not 0 <= self.speed_level <= 255:
            raise ValueError(f"speed_level {self.speed_level} out of range")
        if (self.speed_level == 0) != (self.direction == 0):
            raise ValueError("speed_level must be 0 exactly when direction is 0")
        _check_u16(self.seq, "seq")


@dataclass(frozen=True)
class ThreatReport:
    """Obstacle distance snapshot from the slave. t_measured is local
    bookkeeping only; it never crosses the wire."""

    distance_mm: int
    seq: int = 0
    t_measured: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not 0 <= self.distance_mm <= 0xFFFF:
            raise ValueError(f"distance_mm {self.distance_mm} out of u16 range")
        _check_u16(self.seq, "seq")


@dataclass(frozen=True)
class Heartbeat:
    seq: int = 0

    def __post_init__(self):
        _check_u16(self.seq, "seq")


@dataclass(frozen=True)
class Ack:
    """Echo of a received frame's seq; used for round-trip timing only."""

    acked_seq: int
    seq: int = 0

    def __post_init__(self):
        _check_u16(self.acked_seq, "acked_seq")
        _check_u16(self.seq, "seq")


Message = DriveCommand | ThreatReport | Heartbeat | Ack


def encode_frame(message: Message) -> bytes:
    """Serialize a message to its exact byte layout."""
    if isinstance(message, DriveCommand):
        body = struct.pack("<bB", message.direction, message.speed_level)
        mtype = TYPE_DRIVE_COMMAND
    elif isinstance(message, ThreatReport):
        body = struct.pack("<H", message.distance_mm)
        mtype = TYPE_THREAT_REPORT
    elif isinstance(message, Heartbeat):
        body = b""
        mtype = TYPE_HEARTBEAT
    elif isinstance(message, Ack):
        body = struct.pack("<H", message.acked_seq)
        mtype = TYPE_ACK
    else:
        raise ValueError(f"cannot encode {type(message).__name__}")
    head = struct.pack("<BHB", mtype, message.seq, len(body))
    return bytes([MAGIC]) + head + body + bytes([crc8(head + body)])


def decode_frame(data: bytes) -> Message:
    """Parse and validate one complete frame; raises FrameError subclasses."""
    if len(data) < 6:
        raise FramingError(f"frame truncated at {len(data)} bytes")
    if data[0] != MAGIC:
        raise FramingError(f"bad magic 0x{data[0]:02X}")
    mtype, seq, length = struct.unpack("<BHB", data[1:5])
    if len(data) != 6 + length:
        raise FramingError(f"length byte says {6 + length} bytes, got {len(data)}")
    if crc8(data[1:-1]) != data[-1]:
        raise IntegrityError("crc mismatch")
    payload = data[5:-1]
    if mtype == TYPE_DRIVE_COMMAND:
        if length != 2:
            raise ProtocolError(f"DriveCommand payload must be 2 bytes, got {length}")
        direction, speed = struct.unpack("<bB", payload)
        try:
            return DriveCommand(direction, speed, seq)
        except ValueError as exc:
            raise ProtocolError(str(exc)) from exc
    if mtype == TYPE_THREAT_REPORT:
        if length != 2:
            raise ProtocolError(f"ThreatReport payload must be 2 bytes, got {length}")
        (distance,) = struct.unpack("<H", payload)
        return ThreatReport(distance, seq)
    if mtype == TYPE_HEARTBEAT:
        if length != 0:
            raise ProtocolError(f"Heartbeat payload must be empty, got {length} bytes")
        return Heartbeat(seq)
    if mtype == TYPE_ACK:
        if length != 2:
            raise ProtocolError(f"Ack payload must be 2 bytes, got {length}")
        (acked,) = struct.unpack("<H", payload)
        return Ack(acked, seq)
    raise ProtocolError(f"unknown msg_type 0x{mtype:02X}")


@dataclass(frozen=True)
class ChannelConfig:
    """Impairment model: fixed latency, uniform additive jitter, i.i.d. drop."""

    base_latency: float = 0.0
    jitter_max: float = 0.0
    drop_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.base_latency < 0:
            raise ValueError("base_latency must be >= 0")
        if self.jitter_max < 0:
            raise ValueError("jitter_max must be >= 0")
        # 1.0 is allowed so a total-loss channel stays constructible.
        if not 0 <= self.drop_prob <= 1:
            raise ValueError("drop_prob must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class ChannelStats:
    sent: int = 0
    dropped: int = 0
    delivered: int = 0
    crc_errors: int = 0

    def as_dict(self) -> dict:
        return {
            "sent": self.sent,
            "dropped": self.dropped,
            "delivered": self.delivered,
            "crc_errors": self.crc_errors,
        }


class Channel:
    """One direction of the wireless link.

    Frames travel as encoded bytes. Submission draws the drop and jitter
    variates from a generator seeded by the config, so an identical
    (seed, send schedule) always reproduces the same delivery schedule.
    """

    def __init__(self, config: ChannelConfig, seed: int | None = None):
        self.config = config
        self.stats = ChannelStats()
        self._rng = np.random.Generator(
            np.random.PCG64(config.seed if seed is None else seed)
        )
        self._in_flight: list[tuple[float, int, bytes]] = []
        self._send_idx = 0

    def send(self, message: Message, now: float) -> None:
        raw = encode_frame(message)
        self.stats.sent += 1
        if self._rng.random() < self.config.drop_prob:
            self.stats.dropped += 1
            return
        jitter = self._rng.uniform(0.0, self.config.jitter_max)
        deliver_at = now + self.config.base_latency + jitter
        heapq.heappush(self._in_flight, (deliver_at, self._send_idx, raw))
        self._send_idx += 1

    def next_delivery(self) -> float | None:
        return self._in_flight[0][0] if self._in_flight else None

    def step(self, now: float, eps: float = 0.0) -> list[Message]:
        """Release every frame whose delivery time has passed, ordered by
        delivery time with FIFO tie-break on submission order."""
        out = []
        while self._in_flight and self._in_flight[0][0] <= now + eps:
            _, _, raw = heapq.heappop(self._in_flight)
            try:
                out.append(decode_frame(raw))
            except IntegrityError:
                self.stats.crc_errors += 1
                continue
            self.stats.delivered += 1
        return out


def conformance_vectors() -> list[dict]:
    """Frozen frame corpus shipped with the repo: hex bytes + decoded form."""
    messages: list[Message] = [
        Heartbeat(seq=0),
        Heartbeat(seq=0xFFFF),
        DriveCommand(direction=1, speed_level=128, seq=1),
        DriveCommand(direction=-1, speed_level=255, seq=0x1234),
        DriveCommand(direction=0, speed_level=0, seq=7),
        ThreatReport(distance_mm=500, seq=2),
        ThreatReport(distance_mm=4000, seq=0xFFFF),
        Ack(acked_seq=1, seq=3),
    ]
    vectors = []
    for m in messages:
        raw = encode_frame(m)
        entry = {"type": type(m).__name__, "hex": raw.hex(), "seq": m.seq}
        if isinstance(m, DriveCommand):
            entry["direction"] = m.direction
            entry["speed_level"] = m.speed_level
        elif isinstance(m, ThreatReport):
            entry["distance_mm"] = m.distance_mm
        elif isinstance(m, Ack):
            entry["acked_seq"] = m.acked_seq
        vectors.append(entry)
    return vectors
