"""Timing comparison of the kernel backends.

Run as ``python -m socialnav.benchmark``.  Times each kernel on fixed
synthetic inputs for every importable backend, then (unless
``--no-scenario``) measures whole-simulation throughput per backend by
re-running a built-in scenario in a subprocess with the backend pinned
through ``SOCIALNAV_BACKEND``.  Throughput is reported as the real-time
factor: simulated seconds per wall-clock second.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from . import _kernels_py
from .kernels import BACKEND_NAME, available_backends


def _impl(name):
    if name == "python":
        return _kernels_py
    from . import _kernels
    return _kernels


def _inputs(seed=0):
    rng = np.random.default_rng(seed)
    m = 6
    pair = dict(
        px=0.3, py=-0.2, vx=0.6, vy=0.1,
        opos=rng.uniform(-4, 4, (m, 2)), ovel=rng.uniform(-1.5, 1.5, (m, 2)),
        out=np.empty((m, 2)))
    segs = rng.uniform(-5, 5, (12, 4))
    S, T, N = 200, 15, 4
    rollout = dict(
        poses=np.cumsum(rng.uniform(-0.05, 0.08, (S, T + 1, 3)), axis=1),
        cand_v=rng.uniform(0, 0.6, S),
        apos=rng.uniform(-3, 3, (N, 2)), avel=rng.uniform(-1, 1, (N, 2)),
        arad=np.full(N, 0.35), segs=segs,
        params=(1.2, 1.8, 0.5, 2.0, 0.35, 2.0, 3.0, 2.1, 10.0, 0.1, 0.35),
        out=np.empty(S))
    return pair, segs, rollout


def time_kernels(backend: str, repeat: int = 3) -> dict:
    """Best-of-``repeat`` microsecond timings per kernel call."""
    impl = _impl(backend)
    pair, segs, roll = _inputs()

    def t_pair():
        impl.pair_social_forces(
            pair["px"], pair["py"], pair["vx"], pair["vy"],
            pair["opos"], pair["ovel"], 2.0, 0.35, 2.0, 3.0, 2.1, pair["out"])

    def t_seg():
        impl.nearest_segment_point(0.4, -1.2, segs)

    def t_roll():
        impl.social_work_rollouts(
            roll["poses"], roll["cand_v"], roll["apos"], roll["avel"],
            roll["arad"], roll["segs"], roll["params"], 0.1, roll["out"])

    out = {}
    for name, fn, number in (("pair_social_forces", t_pair, 2000),
                             ("nearest_segment_point", t_seg, 2000),
                             ("social_work_rollouts", t_roll, 5)):
        best = min(timeit.repeat(fn, number=number, repeat=repeat))
        out[name] = best / number * 1e6
    return out


def time_scenario(backend: str, scenario: str, planner: str) -> dict:
    """Full-run wall time with the backend pinned in a fresh interpreter."""
    script = (
        "import json, time\n"
        "from socialnav.scenarios import resolve_scenario, build_world\n"
        f"w = build_world(resolve_scenario({scenario!r}), planner={planner!r})\n"
        "t0 = time.perf_counter()\n"
        "trace = w.run()\n"
        "wall = time.perf_counter() - t0\n"
        "print(json.dumps({'sim_time': trace.duration, 'wall': wall,\n"
        "                  'ticks': len(trace.ticks)}))\n"
    )
    env = dict(os.environ, SOCIALNAV_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", script], env=env,
                          capture_output=True, text=True, check=True)
    data = json.loads(proc.stdout.strip().splitlines()[-1])
    data["rtf"] = data["sim_time"] / data["wall"] if data["wall"] else 0.0
    return data


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="python -m socialnav.benchmark",
        description="Compare the compiled and pure-Python kernel backends.")
    ap.add_argument("--scenario", default="passing",
                    help="built-in name or file for the whole-run comparison")
    ap.add_argument("--planner", default="sfw",
                    help="planner for the whole-run comparison (sfw stresses "
                         "the rollout kernel)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="best-of repetitions for the kernel timings")
    ap.add_argument("--no-scenario", action="store_true",
                    help="skip the whole-simulation comparison")
    args = ap.parse_args(argv)

    backends = available_backends()
    print(f"backends available: {', '.join(backends)} "
          f"(this process uses: {BACKEND_NAME})")

    print("\nper-call kernel timings (microseconds, best of "
          f"{args.repeat}):")
    timings = {b: time_kernels(b, args.repeat) for b in backends}
    kernels = list(next(iter(timings.values())))
    width = max(len(k) for k in kernels)
    header = f"  {'kernel':<{width}}" + "".join(f"{b:>12}" for b in backends)
    print(header + ("     speedup" if len(backends) == 2 else ""))
    for k in kernels:
        row = f"  {k:<{width}}"
        for b in backends:
            row += f"{timings[b][k]:>12.2f}"
        if len(backends) == 2:
            fast_t, slow_t = (timings[backends[0]][k], timings[backends[1]][k])
            row += f"{slow_t / fast_t:>11.1f}x"
        print(row)

    if not args.no_scenario:
        print(f"\nwhole run: scenario={args.scenario!r} "
              f"planner={args.planner!r}")
        for b in backends:
            t0 = time.perf_counter()
            r = time_scenario(b, args.scenario, args.planner)
            total = time.perf_counter() - t0
            print(f"  {b:>8}: {r['ticks']} ticks, {r['sim_time']:.1f} s "
                  f"simulated in {r['wall']:.2f} s wall "
                  f"-> {r['rtf']:.1f}x real time "
                  f"(subprocess total {total:.2f} s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
