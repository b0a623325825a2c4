"""Side-by-side timing of the compiled and interpreted kernel paths.

Measures the three hot kernels directly (JIT vs the same source
interpreted) and one full scripted scenario per backend in a subprocess,
since the backend is fixed at import time via PIEZOTELEOP_BACKEND.

Run:  python3 benchmarks/bench_backends.py [--quick]

Honest caveat: the JIT pays a per-call dispatch cost on the order of a
few microseconds, so scenarios dominated by eventful single-tick calls
(taps, deliveries every tick) can run FASTER on the interpreted path.
The JIT wins on long quiet spans, which is where simulated hours go.
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from piezoteleop.accel import BACKEND  # noqa: E402
from piezoteleop import kernels  # noqa: E402


def best_of(fn, repeats=5):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_rc_sense(n):
    forces = np.cumsum(np.random.default_rng(0).normal(0, 1, n))
    gain, decay = 0.05, 1 - 1e-3

    def compiled():
        kernels.rc_sense_trace(forces, gain, decay)

    def interpreted():
        kernels.rc_sense_trace_py(forces, gain, decay)

    compiled()  # warm the JIT outside the timed region
    return best_of(compiled), best_of(interpreted), f"{n} samples"


def bench_raycast(n_calls):
    rng = np.random.default_rng(1)
    segments = rng.uniform(-5, 5, (8, 4))
    angles = np.linspace(-0.13, 0.13, 351)
    cos_a, sin_a = np.cos(angles), np.sin(angles)

    def compiled():
        for _ in range(n_calls):
            kernels.raycast_min(0.0, 0.0, cos_a, sin_a, segments)

    def interpreted():
        for _ in range(n_calls):
            kernels.raycast_min_py(0.0, 0.0, cos_a, sin_a, segments)

    kernels.raycast_min(0.0, 0.0, cos_a, sin_a, segments)
    return best_of(compiled), best_of(interpreted, repeats=2), f"{n_calls} casts, 351 rays x 8 segs"


def bench_servo_span(n_ticks):
    rec = np.zeros(0)
    args_tail = dict(rec_every=0, rec_idx=0)

    def run(fn):
        fn(
            n_ticks, 0, 1e-4,
            0.0, 1.0,
            1.0, 0.0, 1.0, 0.0,
            0.0, False,
            8.0, 2.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            0.5, 0.2,
            args_tail["rec_every"], args_tail["rec_idx"],
            rec, rec, rec, rec, rec, rec,
            4000.0, 0.0,
        )

    run(kernels.servo_span)
    return (
        best_of(lambda: run(kernels.servo_span)),
        best_of(lambda: run(kernels.servo_span_py), repeats=2),
        f"{n_ticks} ticks, one span call",
    )


def bench_dispatch_overhead(n_calls):
    # n=1 spans model eventful ticks: the call cost dwarfs the arithmetic.
    rec = np.zeros(0)

    def run(fn):
        for _ in range(n_calls):
            fn(
                1, 0, 1e-4,
                0.0, 1.0,
                1.0, 0.0, 1.0, 0.0,
                0.0, False,
                8.0, 2.0,
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                0.5, 0.2,
                0, 0,
                rec, rec, rec, rec, rec, rec,
                4000.0, 0.0,
            )

    run(kernels.servo_span)
    return (
        best_of(lambda: run(kernels.servo_span)),
        best_of(lambda: run(kernels.servo_span_py)),
        f"{n_calls} single-tick calls",
    )


def bench_scenario(backend, scenario, tmp):
    env = os.environ | {"PIEZOTELEOP_BACKEND": backend}
    out = tmp / backend
    t0 = time.perf_counter()
    subprocess.run(
        [sys.executable, "-m", "piezoteleop.cli", "run", str(scenario), "--out", str(out)],
        check=True, capture_output=True, env=env,
    )
    wall = time.perf_counter() - t0
    compute = json.loads((out / "compute_time.json").read_text())
    return wall, compute["ticks_per_s"]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    scale = 10 if args.quick else 1
    rows = [
        ("rc_sense_trace", *bench_rc_sense(2_000_000 // scale)),
        ("raycast_min", *bench_raycast(2_000 // scale)),
        ("servo_span (long)", *bench_servo_span(2_000_000 // scale)),
        ("servo_span (n=1)", *bench_dispatch_overhead(20_000 // scale)),
    ]

    print(f"imported backend: {BACKEND}")
    if BACKEND != "numba":
        print("numba unavailable or disabled; both columns run the same interpreted code\n")
    header = f"{'kernel':<20} {'jit':>10} {'interpreted':>12} {'speedup':>8}  workload"
    print(header)
    print("-" * len(header))
    for name, jit_s, py_s, workload in rows:
        print(f"{name:<20} {jit_s * 1e3:>8.2f}ms {py_s * 1e3:>10.2f}ms {py_s / jit_s:>7.1f}x  {workload}")

    import tempfile

    scenario = REPO / "scenarios" / "tracking_step.json"
    print("\nfull scenario (tracking_step.json, 600k ticks), fresh process per backend:")
    with tempfile.TemporaryDirectory() as tmp:
        for backend in ("numba", "numpy"):
            try:
                wall, tps = bench_scenario(backend, scenario, Path(tmp))
            except subprocess.CalledProcessError as exc:
                print(f"  {backend:<6} failed: {exc.stderr.decode()[:200]}")
                continue
            print(f"  {backend:<6} {wall:6.2f}s process wall, {tps:,.0f} sim ticks/s in the loop")


if __name__ == "__main__":
    main()
