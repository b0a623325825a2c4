"""Scenario runner and metrics emission.

``run_scenario`` executes a scripted scenario and distills the recorded
series into RunMetrics. ``emit_metrics`` writes three files:

  timeseries.csv   fixed column order t, ref_pos, slave_pos, motor_drive,
                   distance_mm, haptic_hz
  summary.json     simulated-time statistics only; byte-identical across
                   runs of the same config and seed
  compute_time.json  wall-clock cost of the run (backend, throughput,
                   per-event compute percentiles); varies run to run and
                   is excluded from every determinism guarantee
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .accel import BACKEND
from .config import ScenarioConfig
from .errors import ConfigError
from .sim import Simulation

SERIES_COLUMNS = ("t", "ref_pos", "slave_pos", "motor_drive", "distance_mm", "haptic_hz")


@dataclass
class RunMetrics:
    series: dict[str, np.ndarray]
    settling_time_s: float | None
    rmse_post_settling_m: float | None
    latencies_sim_s: np.ndarray
    latencies_wall_s: np.ndarray
    incomplete_loops: int
    heartbeat_rtt_s: np.ndarray
    haptic_issues: int
    m2s_stats: dict
    s2m_stats: dict
    dt: float
    duration: float
    seed: int
    ticks: int
    wall_total_s: float
    backend: str


def settle_and_rmse(
    t: np.ndarray, ref: np.ndarray, pos: np.ndarray, band_frac: float = 0.02
) -> tuple[float | None, float | None]:
    """Settling time and post-settling tracking RMSE.

    The band is band_frac of the net reference step (|final - initial|),
    measured from the last sample where the reference still changed.
    Settling is the first entry into the band that is never left again;
    None when the trajectory never stays inside it.
    """
    if len(t) == 0:
        return None, None
    final_ref = ref[-1]
    changed = np.flatnonzero(ref != final_ref)
    start = int(changed[-1]) + 1 if len(changed) else 0
    band = band_frac * abs(final_ref - ref[0])
    err = np.abs(pos[start:] - ref[start:])
    outside = np.flatnonzero(err > band)
    idx = start + (int(outside[-1]) + 1 if len(outside) else 0)
    if idx >= len(t):
        return None, None
    settled = float(t[idx] - t[start]) if start < len(t) else 0.0
    rmse = float(np.sqrt(np.mean((pos[idx:] - ref[idx:]) ** 2)))
    return settled, rmse


def _percentile(arr: np.ndarray, q: float) -> float | None:
    return float(np.percentile(arr, q)) if len(arr) else None


def run_scenario(cfg: ScenarioConfig) -> RunMetrics:
    if cfg.mode != "scripted":
        raise ConfigError("mode", "run_scenario requires mode='scripted'")
    sim = Simulation(cfg)
    t0 = time.perf_counter()
    sim.run()
    wall = time.perf_counter() - t0
    series = sim.series()
    settled, rmse = settle_and_rmse(series["t"], series["ref_pos"], series["slave_pos"])
    return RunMetrics(
        series=series,
        settling_time_s=settled,
        rmse_post_settling_m=rmse,
        latencies_sim_s=np.asarray(sim.latencies_sim),
        latencies_wall_s=np.asarray(sim.latencies_wall),
        incomplete_loops=sim.incomplete_loops,
        heartbeat_rtt_s=np.asarray(sim.heartbeat_rtt),
        haptic_issues=sim.haptic_issues,
        m2s_stats=sim.m2s.stats.as_dict(),
        s2m_stats=sim.s2m.stats.as_dict(),
        dt=cfg.dt,
        duration=cfg.duration,
        seed=cfg.seed,
        ticks=cfg.ticks,
        wall_total_s=wall,
        backend=BACKEND,
    )


def summary_dict(metrics: RunMetrics) -> dict:
    """Simulated-time summary; deterministic for a given config + seed."""
    sim_lat = metrics.latencies_sim_s
    return {
        "dt_s": metrics.dt,
        "duration_s": metrics.duration,
        "ticks": metrics.ticks,
        "seed": metrics.seed,
        "channel": {"m2s": metrics.m2s_stats, "s2m": metrics.s2m_stats},
        "latency": {
            "count": int(len(sim_lat)),
            "incomplete": metrics.incomplete_loops,
            "sim_median_s": _percentile(sim_lat, 50),
            "sim_p95_s": _percentile(sim_lat, 95),
            "sim_p99_s": _percentile(sim_lat, 99),
            "sim_max_s": float(sim_lat.max()) if len(sim_lat) else None,
        },
        "heartbeat_rtt": {
            "count": int(len(metrics.heartbeat_rtt_s)),
            "median_s": _percentile(metrics.heartbeat_rtt_s, 50),
            "p95_s": _percentile(metrics.heartbeat_rtt_s, 95),
        },
        "haptic_issues": metrics.haptic_issues,
        "settling_time_s": metrics.settling_time_s,
        "rmse_post_settling_m": metrics.rmse_post_settling_m,
        "reference_final_m": float(metrics.series["ref_pos"][-1]) if len(metrics.series["t"]) else None,
        "position_final_m": float(metrics.series["slave_pos"][-1]) if len(metrics.series["t"]) else None,
    }


def compute_time_dict(metrics: RunMetrics) -> dict:
    wall = metrics.latencies_wall_s
    return {
        "backend": metrics.backend,
        "wall_total_s": metrics.wall_total_s,
        "ticks_per_s": metrics.ticks / metrics.wall_total_s if metrics.wall_total_s > 0 else None,
        "event_count": int(len(wall)),
        "latency_wall_median_s": _percentile(wall, 50),
        "latency_wall_p95_s": _percentile(wall, 95),
        "latency_wall_p99_s": _percentile(wall, 99),
    }


def format_timeseries_csv(series: dict[str, np.ndarray]) -> str:
    lines = [",".join(SERIES_COLUMNS)]
    cols = [series[name] for name in SERIES_COLUMNS]
    for row in zip(*cols):
        lines.append(",".join(str(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def emit_metrics(metrics: RunMetrics, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "timeseries": out / "timeseries.csv",
        "summary": out / "summary.json",
        "compute_time": out / "compute_time.json",
    }
    paths["timeseries"].write_text(format_timeseries_csv(metrics.series), newline="\n")
    paths["summary"].write_text(
        json.dumps(summary_dict(metrics), sort_keys=True, indent=2) + "\n", newline="\n"
    )
    paths["compute_time"].write_text(
        json.dumps(compute_time_dict(metrics), sort_keys=True, indent=2) + "\n", newline="\n"
    )
    return paths
