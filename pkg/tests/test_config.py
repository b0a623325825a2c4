import json
import math

import pytest

from piezoteleop.config import (
    FULL_SCALE_FORCE,
    ImpulseEvent,
    ReferenceStep,
    ScenarioConfig,
    load_scenario,
    scenario_from_dict,
)
from piezoteleop.errors import ConfigError


def minimal() -> dict:
    return {"duration": 1.0, "seed": 5}


class TestDefaults:
    def test_minimal_scenario_fills_defaults(self):
        cfg = scenario_from_dict(minimal())
        assert cfg.dt == 1e-4
        assert cfg.duration == 1.0
        assert cfg.seed == 5
        assert cfg.mode == "scripted"
        assert cfg.record_every == 1
        assert cfg.plate.d33 == 500e-12
        assert cfg.master.threshold == 0.1
        assert cfg.gains.kp == 8.0
        assert cfg.motor.v_max == 0.5
        assert cfg.ultrasonic.resolution == 3.0
        assert cfg.channel.drop_prob == 0.0
        assert cfg.world.segments.shape == (0, 4)
        assert cfg.script.impulses == ()
        assert cfg.script.reference_steps == ()

    def test_v_full_scale_derives_from_plate(self):
        # Default full-scale voltage is the step response to the
        # full-scale force: d33/C * 10 N = 0.5 V
        cfg = scenario_from_dict(minimal())
        assert cfg.master.v_full_scale == pytest.approx(
            cfg.plate.sense_gain * FULL_SCALE_FORCE
        )
        # an explicit value wins
        data = minimal() | {"master": {"v_full_scale": 0.7}}
        assert scenario_from_dict(data).master.v_full_scale == 0.7

    def test_derived_tick_counts(self):
        cfg = scenario_from_dict(minimal())
        assert cfg.ticks == 10000
        assert cfg.heartbeat_ticks == 1000  # 0.1 s
        assert cfg.measure_ticks == 600  # 0.06 s
        assert cfg.hold_ticks == 5000  # 0.5 s
        assert cfg.feedback_ticks == 600

    def test_channel_seeds_differ_per_direction(self):
        cfg = scenario_from_dict(minimal())
        m2s, s2m = cfg.channel_seeds()
        assert m2s.generate_state(2).tolist() != s2m.generate_state(2).tolist()

    def test_channel_seed_falls_back_to_scenario_seed(self):
        a = scenario_from_dict({"duration": 1.0, "seed": 1})
        b = scenario_from_dict({"duration": 1.0, "seed": 2})
        c = scenario_from_dict({"duration": 1.0, "seed": 2, "channel": {"seed": 1}})
        sa = a.channel_seeds()[0].generate_state(2).tolist()
        sb = b.channel_seeds()[0].generate_state(2).tolist()
        sc = c.channel_seeds()[0].generate_state(2).tolist()
        assert sa != sb
        assert sc == sa  # explicit channel seed overrides the scenario seed


class TestValidation:
    def test_unknown_top_level_field(self):
        with pytest.raises(ConfigError, match="typo_field"):
            scenario_from_dict(minimal() | {"typo_field": 1})

    def test_unknown_nested_field(self):
        with pytest.raises(ConfigError, match="plate.d34"):
            scenario_from_dict(minimal() | {"plate": {"d34": 1e-12}})

    def test_duration_must_be_tick_multiple(self):
        with pytest.raises(ConfigError, match="duration"):
            scenario_from_dict({"duration": 1.00005, "seed": 0})

    def test_bad_mode(self):
        with pytest.raises(ConfigError, match="mode"):
            scenario_from_dict(minimal() | {"mode": "replay"})

    def test_seed_must_be_integer(self):
        with pytest.raises(ConfigError, match="seed"):
            scenario_from_dict({"duration": 1.0, "seed": True})
        with pytest.raises(ConfigError, match="seed"):
            scenario_from_dict({"duration": 1.0, "seed": 1.5})

    def test_seed_range(self):
        with pytest.raises(ConfigError, match="seed"):
            scenario_from_dict({"duration": 1.0, "seed": -1})
        with pytest.raises(ConfigError, match="seed"):
            scenario_from_dict({"duration": 1.0, "seed": 2**64})

    def test_haptic_band_must_stay_below_resonance(self):
        data = minimal() | {"master": {"f_max": 4000.0}}
        with pytest.raises(ConfigError, match="f_max"):
            scenario_from_dict(data)

    def test_impulse_at_time_zero_rejected(self):
        # The charge recurrence defines sample -1 equal to sample 0, so a
        # tick-0 impulse would be invisible; the loader refuses it.
        data = minimal() | {"script": {"impulses": [{"t": 0.0, "force": 10.0}]}}
        with pytest.raises(ConfigError, match="impulses"):
            scenario_from_dict(data)

    def test_impulse_past_end_rejected(self):
        data = minimal() | {"script": {"impulses": [{"t": 1.0, "force": 10.0}]}}
        with pytest.raises(ConfigError):
            scenario_from_dict(data)

    def test_reference_step_at_zero_allowed(self):
        data = minimal() | {"script": {"reference_steps": [{"t": 0.0, "ref": 1.0}]}}
        cfg = scenario_from_dict(data)
        assert cfg.script.reference_steps == (ReferenceStep(t=0.0, ref=1.0),)

    def test_zero_force_impulse_rejected(self):
        data = minimal() | {"script": {"impulses": [{"t": 0.1, "force": 0.0}]}}
        with pytest.raises(ConfigError, match="force"):
            scenario_from_dict(data)

    def test_world_segments_parse(self):
        data = minimal() | {"world": {"segments": [[1.0, -1.0, 1.0, 1.0]]}}
        cfg = scenario_from_dict(data)
        assert cfg.world.segments.shape == (1, 4)

    def test_bad_segment_reported_with_path(self):
        data = minimal() | {"world": {"segments": [[0.0, 0.0, 0.0, 0.0]]}}
        with pytest.raises(ConfigError, match="world"):
            scenario_from_dict(data)

    def test_record_every_must_be_positive_int(self):
        with pytest.raises(ConfigError, match="record_every"):
            scenario_from_dict(minimal() | {"record_every": 0})
        with pytest.raises(ConfigError, match="record_every"):
            scenario_from_dict(minimal() | {"record_every": True})

    def test_live_options_only_checked_in_live_mode(self):
        cfg = scenario_from_dict(minimal() | {"mode": "live"})
        assert cfg.live.telemetry_hz == 30.0
        assert cfg.live.time_scale == 1.0

    def test_non_object_root_rejected(self):
        with pytest.raises(ConfigError):
            scenario_from_dict([1, 2, 3])


class TestSeedOverride:
    def test_override_replaces_scenario_seed(self):
        cfg = scenario_from_dict(minimal(), seed_override=77)
        assert cfg.seed == 77

    def test_override_none_keeps_original(self):
        assert scenario_from_dict(minimal()).seed == 5


class TestLoadScenario:
    def test_round_trip_via_file(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps(minimal() | {"duration": 2.0}))
        cfg = load_scenario(p)
        assert cfg.duration == 2.0
        assert isinstance(cfg, ScenarioConfig)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_scenario(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_scenario(p)

    @pytest.mark.parametrize(
        "name",
        ["response_time", "tracking_step", "wall_approach", "lossy", "live"],
    )
    def test_shipped_scenarios_load(self, name):
        cfg = load_scenario(f"scenarios/{name}.json")
        assert cfg.ticks > 0


class TestEventTypes:
    def test_impulse_defaults(self):
        ev = ImpulseEvent(t=0.05, force=10.0)
        assert ev.hold == 0.005
        assert ev.release == 0.010

    def test_impulse_validation_is_scenario_scoped(self):
        # Event dataclasses hold raw values; tick-grid checks live in
        # ScenarioConfig so they can see dt and duration.
        ev = ImpulseEvent(t=0.0, force=10.0)
        with pytest.raises(ConfigError):
            scenario_from_dict(
                {"duration": 1.0, "seed": 0,
                 "script": {"impulses": [{"t": ev.t, "force": ev.force}]}}
            )
