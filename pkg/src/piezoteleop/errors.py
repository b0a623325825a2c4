"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Invalid scenario configuration. Message carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class FrameError(ValueError):
    """Base class for wire-frame rejections."""


class FramingError(FrameError):
    """Bad magic, truncated frame, or length mismatch."""


class IntegrityError(FrameError):
    """CRC mismatch; the frame is discarded and counted."""


class ProtocolError(FrameError):
    """Structurally sound frame with an unknown type or invalid field content."""


class OutOfModelError(ValueError):
    """Requested operating point falls outside the simplified physical model."""


class DomainError(ValueError):
    """Geometric query outside the world's declared bounds."""
