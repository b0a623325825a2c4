import math

import numpy as np
import pytest

from piezoteleop.errors import DomainError
from piezoteleop.world import UltrasonicParams, WorldModel, raycast_cone

from oracles import random_facing_world, ray_march_cone

PARAMS = UltrasonicParams()
BOUNDS = (-10.0, -10.0, 10.0, 10.0)


def wall_world(x: float, y0: float = -2.0, y1: float = 2.0) -> WorldModel:
    return WorldModel(np.array([[x, y0, x, y1]]), BOUNDS)


class TestUltrasonicParams:
    def test_defaults(self):
        assert PARAMS.range_min == 20.0
        assert PARAMS.range_max == 4000.0
        assert PARAMS.half_angle == pytest.approx(math.radians(7.5))
        assert PARAMS.resolution == 3.0
        assert PARAMS.period == 0.06

    def test_ray_fan_covers_cone(self):
        angles = np.asarray(PARAMS.ray_angles(0.3))
        assert angles[0] == pytest.approx(0.3 - PARAMS.half_angle)
        assert angles[-1] == pytest.approx(0.3 + PARAMS.half_angle)
        # angular step no coarser than one quantum at full range
        assert np.diff(angles).max() <= PARAMS.resolution / PARAMS.range_max + 1e-12

    def test_quantize_rounds_to_grid(self):
        assert PARAMS.quantize_clamp(500.2) == 501.0
        assert PARAMS.quantize_clamp(499.4) == 498.0
        assert PARAMS.quantize_clamp(1200.0) == 1200.0

    def test_quantize_then_clamp_order(self):
        # 19.0 quantizes to 18 first, then clamps up to range_min
        assert PARAMS.quantize_clamp(19.0) == 20.0
        assert PARAMS.quantize_clamp(1.0) == 20.0
        assert PARAMS.quantize_clamp(5000.0) == 4000.0
        assert PARAMS.quantize_clamp(math.inf) == 4000.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(range_min=0.0),
            dict(range_min=4000.0),
            dict(half_angle=0.0),
            dict(half_angle=math.pi / 2),
            dict(resolution=0.0),
            dict(period=0.0),
        ],
    )
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            UltrasonicParams(**kwargs)


class TestWorldModel:
    def test_empty_world_has_no_segments(self):
        world = WorldModel.empty(BOUNDS)
        assert world.segments.shape == (0, 4)
        assert world.contains(0.0, 0.0)
        assert not world.contains(11.0, 0.0)

    def test_zero_length_segment_rejected(self):
        with pytest.raises(ValueError):
            WorldModel(np.array([[1.0, 1.0, 1.0, 1.0]]), BOUNDS)

    def test_segment_outside_bounds_rejected(self):
        with pytest.raises(ValueError):
            WorldModel(np.array([[0.0, 0.0, 20.0, 0.0]]), BOUNDS)

    def test_degenerate_bounds_rejected(self):
        with pytest.raises(ValueError):
            WorldModel.empty((0.0, 0.0, 0.0, 1.0))


class TestRaycast:
    def test_empty_world_reads_full_range(self):
        d = raycast_cone((0.0, 0.0), 0.0, PARAMS, WorldModel.empty(BOUNDS))
        assert d == PARAMS.range_max

    def test_head_on_wall_distance(self):
        # Wall at x = 0.5, sensor at origin heading +x: 500 mm is within
        # half a quantum of the 3 mm grid, so it reads 501.
        d = raycast_cone((0.0, 0.0), 0.0, PARAMS, wall_world(0.5))
        assert d == 501.0

    def test_grid_aligned_wall_exact(self):
        d = raycast_cone((0.0, 0.0), 0.0, PARAMS, wall_world(1.2))
        assert d == 1200.0

    def test_touching_wall_clamps_to_range_min(self):
        d = raycast_cone((0.0, 0.0), 0.0, PARAMS, wall_world(0.001))
        assert d == PARAMS.range_min

    def test_wall_behind_not_seen(self):
        d = raycast_cone((0.0, 0.0), 0.0, PARAMS, wall_world(-0.5))
        assert d == PARAMS.range_max

    def test_wall_outside_cone_not_seen(self):
        # Short wall ahead but offset far enough laterally to miss the cone
        world = WorldModel(np.array([[1.0, 0.5, 1.0, 0.7]]), BOUNDS)
        d = raycast_cone((0.0, 0.0), 0.0, PARAMS, world)
        assert d == PARAMS.range_max

    def test_nearest_of_two_walls_wins(self):
        world = WorldModel(np.array([[0.9, -1.0, 0.9, 1.0], [0.6, -1.0, 0.6, 1.0]]), BOUNDS)
        d = raycast_cone((0.0, 0.0), 0.0, PARAMS, world)
        assert d == 600.0

    def test_monotone_while_approaching(self):
        world = wall_world(2.0)
        xs = np.linspace(0.0, 1.9, 120)
        dists = [raycast_cone((x, 0.0), 0.0, PARAMS, world) for x in xs]
        assert all(b <= a for a, b in zip(dists, dists[1:]))
        # 2000 mm is off the 3 mm grid; nearest multiple is 2001
        assert dists[0] == 2001.0

    def test_origin_outside_bounds_rejected(self):
        with pytest.raises(DomainError):
            raycast_cone((11.0, 0.0), 0.0, PARAMS, WorldModel.empty(BOUNDS))

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_dense_march_oracle(self, seed):
        # Quick cross-check against the brute-force marcher; the full
        # 100-world sweep lives in the acceptance suite.
        rng = np.random.default_rng(1000 + seed)
        segments = random_facing_world(rng, PARAMS.half_angle)
        world = WorldModel(segments, BOUNDS)
        got = raycast_cone((0.0, 0.0), 0.0, PARAMS, world)
        oracle_mm = ray_march_cone((0.0, 0.0), 0.0, PARAMS.half_angle,
                                   PARAMS.range_max / 1000.0, segments) * 1000.0
        assert abs(got - PARAMS.quantize_clamp(oracle_mm)) <= PARAMS.resolution
