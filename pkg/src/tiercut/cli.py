"""Command line front end; a thin client over the service handlers.

Every subcommand builds the same request model the HTTP endpoint takes
and calls the shared handler in-process, so `tiercut partition x.json`
and `POST /partition` are the same operation.

Exit codes: 0 success, 2 unreadable/invalid scenario, 3 infeasible.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .costs import CostError
from .model import ModelError
from .scenario import ScenarioError, bundled_scenarios
from .schemas import (
    CostRequest,
    PartitionRequest,
    PartitionResponse,
    ReplayRequest,
    SimulateRequest,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

OUT_DIR_ENV = "TIERCUT_OUT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiercut",
        description="Partition, simulate and price microservice graphs across edge/cloud tiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="solve the minimum-cost placement for a scenario")
    p.add_argument("scenario", help="path to a scenario JSON file")
    p.add_argument("--multi-tier", action="store_true",
                   help="force the bottom-up multi-tier path (implied by 3+ tiers)")
    p.add_argument("--exact-only", action="store_true",
                   help="force the exact solver even above the size threshold")
    p.add_argument("--constraint", type=float, default=None, metavar="S",
                   help="override every pipeline latency constraint (seconds)")

    s = sub.add_parser("simulate", help="run the discrete-event simulator")
    s.add_argument("scenario")
    s.add_argument("--duration", type=float, required=True, metavar="S")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--seed-range", default=None, metavar="A:B",
                   help="run seeds A..B-1 into per-seed subdirectories")
    s.add_argument("--dynamic", choices=("on", "off"), default="on")
    s.add_argument("--out", default=None, metavar="DIR",
                   help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    s.add_argument("--metrics", action="store_true", help="also write metrics.csv")

    c = sub.add_parser("cost", help="price the scenario's deployment plans")
    c.add_argument("scenario")

    r = sub.add_parser("replay", help="evaluate the partitioner at one instant of the traces")
    r.add_argument("scenario")
    r.add_argument("--at", type=float, default=0.0, metavar="S")
    r.add_argument("--multi-tier", action="store_true")
    r.add_argument("--exact-only", action="store_true")

    sub.add_parser("scenarios", help="list scenario fixtures bundled with the package")

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)

    return parser


def _print_partition(resp: PartitionResponse) -> None:
    print(f"scenario: {resp.scenario}")
    print(f"solver:   {resp.solver}")
    print(f"feasible: {'yes' if resp.feasible else 'no'}")
    for ms, tier in resp.placement.items():
        print(f"  {ms} -> {tier}")
    for lat in resp.latencies:
        mark = "ok" if lat.meets_constraint else "VIOLATED"
        print(
            f"pipeline {lat.pipeline}: {lat.latency_s * 1000:.3f} ms "
            f"(constraint {lat.constraint_s * 1000:.3f} ms, {mark})"
        )
    if resp.proxies:
        print(f"proxies:  {', '.join(resp.proxies)}")
    print(f"cost:     {resp.cost:.9g}")


def _cmd_partition(args) -> int:
    req = PartitionRequest(
        scenario_path=args.scenario,
        multi_tier=args.multi_tier,
        exact_only=args.exact_only,
        constraint_s=args.constraint,
    )
    from .runner import run_partition

    resp = run_partition(req)
    _print_partition(resp)
    if not resp.feasible:
        print(
            f"developer notification: no placement satisfies pipeline "
            f"{resp.violated_pipeline!r} under the given constraints",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    return EXIT_OK


def _out_dir(args) -> Path:
    base = args.out or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_one_simulation(args, seed: int, out_dir: Path) -> int:
    from .runner import run_simulate

    req = SimulateRequest(
        scenario_path=args.scenario,
        duration_s=args.duration,
        seed=seed,
        dynamic=args.dynamic == "on",
        include_csv=True,
        metrics=args.metrics,
    )
    resp = run_simulate(req)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "latency.csv").write_text(resp.latency_csv)
    (out_dir / "links.csv").write_text(resp.links_csv)
    (out_dir / "events.csv").write_text(resp.events_csv)
    if resp.metrics_csv is not None:
        (out_dir / "metrics.csv").write_text(resp.metrics_csv)
    print(
        f"scenario={resp.scenario} seed={resp.seed} dynamic={'on' if resp.dynamic else 'off'} "
        f"duration_s={resp.duration_s:g} units={resp.units_completed}/{resp.units_emitted} "
        f"remaps={resp.remap_count}"
    )
    for p in resp.pipelines:
        print(
            f"pipeline={p.pipeline} p50_ms={p.p50_ms:.3f} p95_ms={p.p95_ms:.3f} "
            f"max_ms={p.max_ms:.3f} violation_s={p.violation_s:.3f} units={p.units_completed}"
        )
    print(f"wrote latency.csv links.csv events.csv to {out_dir}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    out = _out_dir(args)
    if args.seed_range:
        try:
            a, b = (int(x) for x in args.seed_range.split(":"))
        except ValueError:
            print(f"invalid --seed-range {args.seed_range!r}, expected A:B", file=sys.stderr)
            return EXIT_INPUT
        for seed in range(a, b):
            code = _run_one_simulation(args, seed, out / f"seed-{seed}")
            if code != EXIT_OK:
                return code
        return EXIT_OK
    return _run_one_simulation(args, args.seed, out)


def _cmd_cost(args) -> int:
    from .runner import run_cost

    resp = run_cost(CostRequest(scenario_path=args.scenario))
    header = f"{'plan':<20} {'$/hour':>10} {'compute/mo':>12} {'storage/mo':>12} {'total/mo':>12}"
    print(header)
    print("-" * len(header))
    for p in resp.plans:
        print(
            f"{p.plan:<20} {p.hourly:>10.4f} {p.compute:>12.2f} "
            f"{p.storage:>12.2f} {p.total:>12.2f}"
        )
    print()
    print(resp.csv, end="")
    return EXIT_OK


def _cmd_replay(args) -> int:
    from .runner import run_replay

    req = ReplayRequest(
        scenario_path=args.scenario,
        at_s=args.at,
        multi_tier=args.multi_tier,
        exact_only=args.exact_only,
    )
    resp = run_replay(req)
    print(f"at_s: {resp.at_s:g}")
    for key, value in resp.bandwidth_mbps.items():
        print(f"  {key}: {value:g} Mbit/s")
    _print_partition(resp)
    if not resp.feasible:
        print(
            f"developer notification: no placement satisfies pipeline "
            f"{resp.violated_pipeline!r} at t={resp.at_s:g}s",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_scenarios(_args) -> int:
    for name, path in bundled_scenarios().items():
        print(f"{name}\t{path}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "partition": _cmd_partition,
        "simulate": _cmd_simulate,
        "cost": _cmd_cost,
        "replay": _cmd_replay,
        "scenarios": _cmd_scenarios,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (ScenarioError, CostError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
