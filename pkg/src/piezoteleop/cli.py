"""Command-line entry points.

  piezoteleop run <scenario.json> --out <dir> [--seed N]
  piezoteleop serve <scenario.json> [--port P] [--host H]
  piezoteleop vectors [--out FILE]

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .channel import conformance_vectors
from .config import load_scenario
from .errors import ConfigError
from .harness import emit_metrics, run_scenario, summary_dict

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="piezoteleop",
        description="Deterministic piezo teleoperation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scripted scenario and write metrics")
    run_p.add_argument("scenario", help="scenario JSON file")
    run_p.add_argument("--out", required=True, help="output directory for metrics files")
    run_p.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    serve_p = sub.add_parser("serve", help="serve a live scenario for the operator console")
    serve_p.add_argument("scenario", help="scenario JSON file (mode must be 'live')")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--host", default="127.0.0.1")

    vec_p = sub.add_parser("vectors", help="emit wire-format conformance vectors as JSON")
    vec_p.add_argument("--out", default=None, help="write to this file instead of stdout")
    return parser


def _cmd_run(args) -> int:
    cfg = load_scenario(args.scenario, seed_override=args.seed)
    metrics = run_scenario(cfg)
    paths = emit_metrics(metrics, args.out)
    summary = summary_dict(metrics)
    lat = summary["latency"]
    print(f"wrote {paths['timeseries']} ({len(metrics.series['t'])} rows)")
    print(f"wrote {paths['summary']}")
    print(f"wrote {paths['compute_time']} (wall {metrics.wall_total_s:.3f} s, backend {metrics.backend})")
    print(
        "loop latency: "
        f"count={lat['count']} incomplete={lat['incomplete']} "
        f"median={lat['sim_median_s']} max={lat['sim_max_s']}"
    )
    print(
        f"settling={summary['settling_time_s']} s "
        f"rmse={summary['rmse_post_settling_m']} m "
        f"drops m2s={summary['channel']['m2s']['dropped']}/{summary['channel']['m2s']['sent']} "
        f"s2m={summary['channel']['s2m']['dropped']}/{summary['channel']['s2m']['sent']}"
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    cfg = load_scenario(args.scenario)
    if cfg.mode != "live":
        raise ConfigError("mode", "serve requires a scenario with mode='live'")
    from .live import serve  # deferred: keeps scripted CLI free of server deps

    serve(cfg, host=args.host, port=args.port)
    return EXIT_OK


def _cmd_vectors(args) -> int:
    text = json.dumps(conformance_vectors(), indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "serve":
            return _cmd_serve(args)
        return _cmd_vectors(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # surfaced with context, mapped to exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
