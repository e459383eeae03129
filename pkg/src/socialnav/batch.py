"""Batch experiments: repetitions x planners, per-run reports, summary.

Each run gets seed ``base_seed + rep`` and its own output directory
``<out>/<planner>/rep_NNN/`` holding the full trace dump plus the metric
reports; after all runs a ``summary.tsv`` gives mean and standard
deviation of every metric final per planner.  Runs can execute in a
process pool; outputs are identical either way because every run owns
its directory and the summary is written after the joins.
"""

from __future__ import annotations

import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evaluator import evaluate, resolve_metric_names, write_reports
from .scenarios import build_world, config_from_dict, config_to_dict, resolve_scenario
from .world import dump_trace


@dataclass
class RunBatch:
    scenario: object              # built-in name, file path, or config
    planners: list
    reps: int = 1
    base_seed: int = 0
    out_dir: object = None        # None: evaluate only, write nothing
    metrics: object = "all"
    jobs: int = 1
    dump_traces: bool = True


@dataclass
class RunResult:
    planner: str
    rep: int
    seed: int
    ok: bool
    error: str = ""
    finals: dict = field(default_factory=dict)
    sim_time: float = 0.0
    wall_time: float = 0.0
    out_dir: str = ""


@dataclass
class BatchSummary:
    results: list
    metric_names: list
    ok: bool
    sim_time: float
    wall_time: float

    def finals_by_planner(self) -> dict:
        by = {}
        for r in self.results:
            by.setdefault(r.planner, []).append(r)
        return by


def _execute_run(cfg_dict, planner, rep, seed, out, metrics, dump):
    """One full run; module-level so process pools can pick it up."""
    t0 = time.perf_counter()
    try:
        cfg = config_from_dict(cfg_dict)
        world = build_world(cfg, planner=planner, seed=seed)
        trace = world.run()
        report = evaluate(trace, metrics=None if metrics == "all" else metrics)
        run_dir = ""
        if out is not None:
            run_d = Path(out) / planner / f"rep_{rep:03d}"
            run_d.mkdir(parents=True, exist_ok=True)
            if dump:
                dump_trace(trace, run_d / "trace.tsv")
            write_reports(report, trace, run_d)
            run_dir = str(run_d)
        finals = {n: report.overall[n].final for n in report.names}
        return RunResult(
            planner=planner, rep=rep, seed=seed, ok=True, finals=finals,
            sim_time=trace.duration, wall_time=time.perf_counter() - t0,
            out_dir=run_dir)
    except Exception:
        return RunResult(planner=planner, rep=rep, seed=seed, ok=False,
                         error=traceback.format_exc(),
                         wall_time=time.perf_counter() - t0)


def run_batch(batch: RunBatch) -> BatchSummary:
    if batch.reps < 1:
        raise ValueError("reps: must be >= 1")
    cfg = resolve_scenario(batch.scenario)
    cfg_dict = config_to_dict(cfg)
    names = resolve_metric_names(
        None if batch.metrics == "all" else batch.metrics)
    out = None if batch.out_dir is None else str(batch.out_dir)

    jobs = []
    for planner in batch.planners:
        for rep in range(batch.reps):
            jobs.append((cfg_dict, planner, rep, batch.base_seed + rep,
                         out, batch.metrics, batch.dump_traces))

    t0 = time.perf_counter()
    if batch.jobs > 1:
        with ProcessPoolExecutor(max_workers=batch.jobs) as pool:
            results = list(pool.map(_execute_run, *zip(*jobs)))
    else:
        results = [_execute_run(*j) for j in jobs]
    wall = time.perf_counter() - t0

    summary = BatchSummary(
        results=results, metric_names=names,
        ok=all(r.ok for r in results),
        sim_time=sum(r.sim_time for r in results), wall_time=wall)
    if out is not None:
        write_summary(summary, Path(out) / "summary.tsv")
    return summary


def summary_rows(summary: BatchSummary):
    """(planner, metric, mean, std) rows; absent metrics give nan."""
    rows = []
    for planner, runs in summary.finals_by_planner().items():
        good = [r for r in runs if r.ok]
        for name in summary.metric_names:
            vals = [r.finals.get(name) for r in good]
            vals = [np.nan if v is None else v for v in vals]
            if not vals:
                mean = std = float("nan")
            else:
                mean = float(np.mean(vals))
                std = float(np.std(vals))
            rows.append((planner, name, mean, std))
    return rows


def write_summary(summary: BatchSummary, path) -> None:
    lines = ["planner\tmetric\tmean\tstd"]
    for planner, metric, mean, std in summary_rows(summary):
        lines.append(f"{planner}\t{metric}\t{mean:.6g}\t{std:.6g}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_summary(path) -> dict:
    """summary.tsv back as {(planner, metric): (mean, std)}."""
    out = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for line in lines[1:]:
        planner, metric, mean, std = line.split("\t")
        out[(planner, metric)] = (float(mean), float(std))
    return out
