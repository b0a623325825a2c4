"""2D static obstacle geometry and the cone ray-cast the ultrasonic model needs.

Obstacles are line segments; walls and boxes decompose into segments. The
sensor query fans rays across the cone at an angular step no coarser than
resolution/range_max, so any segment subtending at least one resolution
quantum at full range is guaranteed to be sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import raycast_min

MM_PER_M = 1000.0


@dataclass(frozen=True)
class UltrasonicParams:
    """Clamped, quantized cone ranger modeled on a hobby ultrasonic module."""

    range_min: float = 20.0  # mm
    range_max: float = 4000.0  # mm
    half_angle: float = math.radians(7.5)  # rad
    resolution: float = 3.0  # mm
    period: float = 0.06  # s between periodic measurements

    def __post_init__(self):
        if not 0 < self.range_min < self.range_max:
            raise ValueError("need 0 < range_min < range_max")
        if not 0 < self.half_angle < math.pi / 2:
            raise ValueError("half_angle must be in (0, pi/2)")
        if not self.resolution > 0:
            raise ValueError("resolution must be > 0")
        if not self.period > 0:
            raise ValueError("period must be > 0")

    def ray_angles(self, heading: float) -> np.ndarray:
        """Cone sample angles, step <= resolution/range_max so nothing
        wider than one quantum at full range slips between rays."""
        step = self.resolution / self.range_max
        n = max(3, int(math.ceil(2.0 * self.half_angle / step)) + 1)
        return np.linspace(heading - self.half_angle, heading + self.half_angle, n)

    def quantize_clamp(self, distance_mm: float) -> float:
        """Round to the resolution grid, then clamp into the sensed range."""
        if math.isfinite(distance_mm):
            distance_mm = math.floor(distance_mm / self.resolution + 0.5) * self.resolution
        return min(max(distance_mm, self.range_min), self.range_max)


@dataclass(frozen=True)
class WorldModel:
    """Immutable obstacle set: (N, 4) array of segments plus an AABB."""

    segments: np.ndarray  # rows (x1, y1, x2, y2), meters
    bounds: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax

    def __post_init__(self):
        segs = np.asarray(self.segments, dtype=np.float64).reshape(-1, 4)
        object.__setattr__(self, "segments", segs)
        bounds = tuple(float(b) for b in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        xmin, ymin, xmax, ymax = bounds
        if not (np.isfinite(bounds).all() and xmin < xmax and ymin < ymax):
            raise ValueError("bounds must be a finite (xmin, ymin, xmax, ymax) box")
        if not np.all(np.isfinite(segs)):
            raise ValueError("segment coordinates must be finite")
        lengths = np.hypot(segs[:, 2] - segs[:, 0], segs[:, 3] - segs[:, 1])
        if np.any(lengths == 0):
            raise ValueError("segments must have nonzero length")
        xs = segs[:, (0, 2)]
        ys = segs[:, (1, 3)]
        if segs.shape[0] and not (
            (xs >= xmin).all() and (xs <= xmax).all() and (ys >= ymin).all() and (ys <= ymax).all()
        ):
            raise ValueError("all segments must lie inside bounds")

    @classmethod
    def empty(cls, bounds=(-10.0, -10.0, 10.0, 10.0)) -> "WorldModel":
        return cls(np.empty((0, 4)), bounds)

    def contains(self, x: float, y: float) -> bool:
        xmin, ymin, xmax, ymax = self.bounds
        return xmin <= x <= xmax and ymin <= y <= ymax


def raycast_cone(
    origin: tuple[float, float],
    heading: float,
    params: UltrasonicParams,
    world: WorldModel,
) -> float:
    """Nearest obstacle distance (mm) inside the sensing cone.

    Minimum analytic ray-segment intersection over the fanned rays,
    quantized to the sensor resolution and clamped to its range. No hit
    clamps to range_max.
    """
    x, y = float(origin[0]), float(origin[1])
    if not world.contains(x, y):
        raise DomainError(f"ray-cast origin ({x}, {y}) outside world bounds {world.bounds}")
    if world.segments.shape[0] == 0:
        return params.range_max
    angles = params.ray_angles(heading)
    best_m = raycast_min(x, y, np.cos(angles), np.sin(angles), world.segments)
    return params.quantize_clamp(best_m * MM_PER_M)
