"""Command-line interface.

Subcommands::

    run            simulate a scenario and write metric reports
    validate       check a scenario file and report the first problem
    list-metrics   the metric registry (name, unit, description)
    list-behaviors the pedestrian behavior names
    list-planners  the registered local planners

``run`` writes to ``--out``, else ``$SOCIALNAV_OUT``, else ``./runs``.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import kernels
from .batch import RunBatch, run_batch
from .behaviors import BEHAVIOR_NAMES, BEHAVIOR_SUMMARIES
from .evaluator import METRICS
from .planners import PLANNERS
from .scenarios import ScenarioError, load_scenario, resolve_scenario

DEFAULT_OUT_ENV = "SOCIALNAV_OUT"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="socialnav",
        description="Headless social-navigation simulator and benchmark.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate and evaluate a scenario")
    run.add_argument("--scenario", required=True,
                     help="built-in name (passing, crossing, combined) or "
                          "a scenario YAML path")
    run.add_argument("--planner", default=None,
                     help="planner name or 'all' (default: scenario's)")
    run.add_argument("--reps", type=int, default=1,
                     help="repetitions per planner (seeds = seed, seed+1, ...)")
    run.add_argument("--seed", type=int, default=None,
                     help="base seed (default: scenario's)")
    run.add_argument("--out", default=None,
                     help=f"output directory (default: ${DEFAULT_OUT_ENV} "
                          "or ./runs)")
    run.add_argument("--metrics", default="all",
                     help="'all' or a comma-separated list of metric names")
    run.add_argument("--jobs", type=int, default=1,
                     help="parallel worker processes")
    run.add_argument("--no-trace", action="store_true",
                     help="skip the per-run trace.tsv dumps")

    val = sub.add_parser("validate", help="validate a scenario file")
    val.add_argument("--scenario", required=True, help="scenario YAML path")

    sub.add_parser("list-metrics", help="show the metric registry")
    sub.add_parser("list-behaviors", help="show the behavior names")
    sub.add_parser("list-planners", help="show the registered planners")
    return p


def _cmd_run(args) -> int:
    try:
        cfg = resolve_scenario(args.scenario)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.planner in (None, ""):
        planners = [cfg.robot.planner]
    elif args.planner == "all":
        planners = sorted(PLANNERS)
    else:
        if args.planner not in PLANNERS:
            print(f"error: unknown planner '{args.planner}' "
                  f"(valid: {', '.join(sorted(PLANNERS))})", file=sys.stderr)
            return 2
        planners = [args.planner]
    metrics = ("all" if args.metrics == "all"
               else [m.strip() for m in args.metrics.split(",") if m.strip()])
    out = args.out or os.environ.get(DEFAULT_OUT_ENV) or "runs"
    seed = cfg.sim.seed if args.seed is None else args.seed

    batch = RunBatch(scenario=cfg, planners=planners, reps=args.reps,
                     base_seed=seed, out_dir=out, metrics=metrics,
                     jobs=args.jobs, dump_traces=not args.no_trace)
    try:
        summary = run_batch(batch)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    print(f"scenario {cfg.name}: {len(summary.results)} runs "
          f"({len(planners)} planner(s) x {args.reps} rep(s)), "
          f"backend={kernels.BACKEND_NAME}")
    for r in summary.results:
        if r.ok:
            done = r.finals.get("completed")
            status = "goal reached" if done == 1.0 else "timed out"
            print(f"  {r.planner} rep {r.rep} seed {r.seed}: {status}, "
                  f"sim {r.sim_time:.1f} s, wall {r.wall_time:.2f} s")
        else:
            print(f"  {r.planner} rep {r.rep} seed {r.seed}: ABORTED")
            print(r.error, file=sys.stderr)
    print(f"reports under {out}/ (summary.tsv + per-run directories)")
    return 0 if summary.ok else 1


def _cmd_validate(args) -> int:
    try:
        cfg = load_scenario(args.scenario)
    except (OSError, ScenarioError) as e:
        print(f"invalid: {e}", file=sys.stderr)
        return 2
    print(f"ok: '{cfg.name}' ({len(cfg.agents)} agents, "
          f"planner {cfg.robot.planner})")
    return 0


def _cmd_list_metrics(_args) -> int:
    width = max(len(n) for n in METRICS)
    for spec in METRICS.values():
        print(f"{spec.name:<{width}}  [{spec.unit}]  {spec.description}")
    return 0


def _cmd_list_behaviors(_args) -> int:
    for name in BEHAVIOR_NAMES:
        print(f"{name:<12}  {BEHAVIOR_SUMMARIES.get(name, '')}")
    return 0


def _cmd_list_planners(_args) -> int:
    for name in sorted(PLANNERS):
        doc = (PLANNERS[name].__doc__ or "").strip().splitlines()
        print(f"{name:<6}  {doc[0] if doc else ''}")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "validate": _cmd_validate,
        "list-metrics": _cmd_list_metrics,
        "list-behaviors": _cmd_list_behaviors,
        "list-planners": _cmd_list_planners,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
