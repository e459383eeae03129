"""Metric suite vs. the independent oracle, plus report files."""

import math

import pytest

import oracle_metrics
from socialnav import evaluator
from socialnav.evaluator import (
    METRICS,
    TraceArrays,
    evaluate,
    register_metric,
    resolve_metric_names,
    write_reports,
)
from socialnav.world import dump_trace
from synthetic_traces import DT, build_pass, build_square, build_stationary

ALL_NAMES = list(METRICS)


@pytest.fixture(scope="module")
def traces(tmp_path_factory):
    """The stock scripted traces, each also dumped to disk for the oracle."""
    out = tmp_path_factory.mktemp("traces")
    built = {
        "stationary": build_stationary(),
        "pass_tight": build_pass(0.3),
        "pass_medium": build_pass(0.8),
        "pass_wide": build_pass(2.0),
        "square": build_square(),
    }
    dumped = {}
    for name, trace in built.items():
        path = out / f"{name}.tsv"
        dump_trace(trace, path)
        dumped[name] = (trace, path)
    return dumped


def _assert_close(name, got, want, tol=1e-9):
    if want is None:
        assert got is None, f"{name}: expected absent, got {got}"
        return
    assert got is not None, f"{name}: expected {want}, got absent"
    assert got == pytest.approx(want, abs=tol, rel=tol), (
        f"{name}: {got} != {want}")


def test_registry_has_the_full_suite():
    assert len(ALL_NAMES) == 28
    assert ALL_NAMES[0] == "time_to_reach_goal"
    assert ALL_NAMES[-1] == "social_work"
    assert "social+_space_intrusions" in ALL_NAMES
    assert "group_social+_space_intrusions" in ALL_NAMES


@pytest.mark.parametrize("key", ["stationary", "pass_tight", "pass_medium",
                                 "pass_wide", "square"])
def test_matches_oracle_overall(traces, key):
    trace, path = traces[key]
    report = evaluate(trace)
    expected = oracle_metrics.compute(path)
    assert set(expected) == set(ALL_NAMES)
    for name in ALL_NAMES:
        _assert_close(name, report.overall[name].final, expected[name])


def test_matches_oracle_per_behavior(traces):
    trace, path = traces["stationary"]
    report = evaluate(trace)
    assert set(report.groups) == {"regular", "impassive"}
    for behavior in report.groups:
        expected = oracle_metrics.compute(path, behavior=behavior)
        for name in ALL_NAMES:
            _assert_close(f"{behavior}:{name}",
                          report.groups[behavior][name].final, expected[name])


def test_zone_percentages_partition_every_tick(traces):
    for trace, _ in traces.values():
        report = evaluate(trace)
        n = len(trace.ticks)
        for prefix in ("", "group_"):
            results = [report.overall[prefix + z + "_space_intrusions"]
                       for z in ("intimate", "personal", "social+")]
            if results[0].final is None:
                continue
            flags = [sum(r.series) for r in results]
            assert sum(flags) == n  # each tick falls in exactly one zone
            assert sum(r.final for r in results) == pytest.approx(100.0)


def test_social_work_identity_per_tick(traces):
    for trace, _ in traces.values():
        report = evaluate(trace)
        work = report.overall["social_work"].series
        parts = [report.overall[k].series for k in (
            "social_force_on_robot", "obstacle_force_on_robot",
            "social_force_on_agents")]
        for k in range(len(trace.ticks)):
            assert work[k] == pytest.approx(
                parts[0][k] + parts[1][k] + parts[2][k], abs=1e-12)


# -- hand-computed spot checks ---------------------------------------------

def test_square_kinematics(traces):
    trace, _ = traces["square"]
    r = evaluate(trace).overall
    assert r["path_length"].final == pytest.approx(8.0, abs=1e-9)
    assert r["cumulative_heading_changes"].final == pytest.approx(
        2.0 * math.pi, abs=1e-9)
    assert r["completed"].final == 1.0
    assert r["time_not_moving"].final == pytest.approx(30 * DT + DT, abs=1e-9)


def test_wide_pass_stays_social(traces):
    trace, _ = traces["pass_wide"]
    r = evaluate(trace).overall
    assert r["social+_space_intrusions"].final == pytest.approx(100.0)
    assert r["intimate_space_intrusions"].final == 0.0
    assert r["robot_on_person_collisions"].final == 0.0
    assert r["person_on_robot_collisions"].final == 0.0
    assert r["min_dist_to_people"].final == pytest.approx(1.4, abs=0.05)


def test_tight_pass_collides_once_person_attributed(traces):
    trace, _ = traces["pass_tight"]
    r = evaluate(trace).overall
    assert r["person_on_robot_collisions"].final == 1.0
    assert r["robot_on_person_collisions"].final == 0.0
    assert r["min_dist_to_people"].final == 0.0
    assert r["intimate_space_intrusions"].final > 0.0


def test_stationary_robot_hit_exactly_once(traces):
    trace, _ = traces["stationary"]
    r = evaluate(trace).overall
    assert r["person_on_robot_collisions"].final == 1.0
    assert r["avg_robot_linear_speed"].final == 0.0
    assert r["path_length"].final == 0.0
    assert r["time_not_moving"].final == pytest.approx(
        len(trace.ticks) * DT, abs=1e-9)
    # spiral walker ends inside intimate range
    assert r["intimate_space_intrusions"].final > 0.0


def test_group_zone_metrics_present_only_with_groups(traces):
    with_groups = evaluate(traces["stationary"][0]).overall
    assert with_groups["group_personal_space_intrusions"].final is not None
    without = evaluate(traces["pass_tight"][0]).overall
    assert without["group_personal_space_intrusions"].final is None


# -- report files ----------------------------------------------------------

def test_write_reports_two_behavior_groups(traces, tmp_path):
    trace, _ = traces["stationary"]
    report = evaluate(trace)
    files = write_reports(report, trace, tmp_path)
    names = sorted(p.name for p in files)
    assert names == [
        "metrics.tsv", "metrics_impassive.tsv", "metrics_regular.tsv",
        "metrics_steps.tsv", "metrics_steps_impassive.tsv",
        "metrics_steps_regular.tsv",
    ]
    header, row = (tmp_path / "metrics.tsv").read_text().splitlines()
    assert header.split("\t") == ALL_NAMES
    assert len(row.split("\t")) == 28

    steps = (tmp_path / "metrics_steps.tsv").read_text().splitlines()
    assert len(steps) == 1 + len(trace.ticks)
    cols = steps[0].split("\t")
    assert cols[0] == "time"
    with_series = [n for n in ALL_NAMES if report.overall[n].series is not None]
    assert cols[1:] == with_series


def test_write_reports_single_group(traces, tmp_path):
    trace, _ = traces["square"]
    files = write_reports(evaluate(trace), trace, tmp_path)
    assert sorted(p.name for p in files) == [
        "metrics.tsv", "metrics_regular.tsv", "metrics_steps.tsv",
        "metrics_steps_regular.tsv",
    ]


def test_absent_metrics_written_as_nan(traces, tmp_path):
    trace, _ = traces["pass_tight"]  # no declared groups
    write_reports(evaluate(trace), trace, tmp_path)
    header, row = (tmp_path / "metrics.tsv").read_text().splitlines()
    values = dict(zip(header.split("\t"), row.split("\t")))
    assert values["group_intimate_space_intrusions"] == "nan"


def test_metric_selection_and_errors(traces):
    trace, _ = traces["square"]
    report = evaluate(trace, metrics=["path_length", "completed"])
    assert report.names == ["path_length", "completed"]
    assert set(report.overall) == {"path_length", "completed"}
    with pytest.raises(ValueError, match="unknown metrics"):
        resolve_metric_names(["path_length", "bogus_metric"])
    assert resolve_metric_names(None) == ALL_NAMES
    assert resolve_metric_names("all") == ALL_NAMES


def test_register_custom_metric(traces):
    def m_tick_count(arrays: TraceArrays):
        return evaluator.MetricResult(final=float(len(arrays.t)))

    register_metric("tick_count", m_tick_count, unit="-",
                    description="number of recorded ticks")
    try:
        trace, _ = traces["square"]
        report = evaluate(trace, metrics=["tick_count"])
        assert report.overall["tick_count"].final == len(trace.ticks)
    finally:
        del METRICS["tick_count"]
