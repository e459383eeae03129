"""Trace evaluation: the 28-metric suite and tab-separated reports.

Metrics are pure aggregations over a recorded trace (states, forces, and
collision events); nothing here re-runs physics.  Every metric exists in
a registry keyed by its exact report identifier, in the report column
order; callers may register additional metrics.

Distances between the robot and a person are surface-to-surface (center
distance minus both radii, clamped at zero).  Personal-space zones:
intimate [0, 0.45) m, personal [0.45, 1.2) m, social+ [1.2, inf) m.
Declared walking groups occupy the convex hull of their members' centers
buffered by the largest member radius.

Force metrics are per-tick aggregates averaged over the tick count:
``social_force_on_agents`` sums the robot-attributable summand moduli
over the agents; ``social_force_on_robot`` is the modulus of the agents'
total push on the robot; ``social_work`` is the per-tick sum of those two
plus the robot's obstacle force modulus, so it always equals the sum of
the three component metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import convex_hull, distance_to_hull
from .world import PERSON_ON_ROBOT, ROBOT_ON_PERSON, SimTrace

ZONE_INTIMATE = 0.45
ZONE_PERSONAL = 1.2

STOPPED_V = 0.01
STOPPED_W = 0.05


@dataclass
class MetricResult:
    final: float | None
    series: list | None = None  # one value per tick when the metric has one


@dataclass
class MetricSpec:
    name: str
    unit: str
    description: str
    fn: object
    has_series: bool = True


class TraceArrays:
    """Flat numpy view of a trace, optionally scoped to one behavior."""

    def __init__(self, trace: SimTrace, behavior: str | None = None):
        ticks = trace.ticks
        if not ticks:
            raise ValueError("cannot evaluate an empty trace")
        self.dt = trace.dt
        self.goal = np.asarray(trace.goal)
        self.goal_radius = trace.goal_radius
        self.t = np.array([tk.t for tk in ticks])
        self.robot_pos = np.array([tk.robot.pos for tk in ticks])
        self.robot_heading = np.array([tk.robot.heading for tk in ticks])
        self.robot_v = np.array([tk.robot.v for tk in ticks])
        self.robot_w = np.array([tk.robot.w for tk in ticks])
        self.robot_radius = ticks[0].robot.radius
        self.robot_obstacle = np.array([tk.robot.obstacle_force for tk in ticks])

        all_agents = ticks[0].agents
        idx = [i for i, a in enumerate(all_agents)
               if behavior is None or a.behavior == behavior]
        self.n_agents = len(idx)
        self.behaviors = [all_agents[i].behavior for i in idx]
        self.agent_ids = [all_agents[i].id for i in idx]
        self.group_ids = [all_agents[i].group_id for i in idx]
        self.agent_radius = np.array([all_agents[i].radius for i in idx])
        K, M = len(ticks), len(idx)
        self.agent_pos = np.empty((K, M, 2))
        self.agent_vel = np.empty((K, M, 2))
        self.force_robot_social = np.empty((K, M, 2))
        self.force_to_robot = np.empty((K, M, 2))
        self.force_obstacle = np.empty((K, M, 2))
        for k, tk in enumerate(ticks):
            for m, i in enumerate(idx):
                a = tk.agents[i]
                self.agent_pos[k, m] = a.pos
                self.agent_vel[k, m] = a.vel
                self.force_robot_social[k, m] = a.forces.robot_social
                self.force_to_robot[k, m] = a.to_robot_social
                self.force_obstacle[k, m] = a.forces.obstacle
        sel_ids = set(self.agent_ids)
        self.collisions = [
            c for tk in ticks for c in tk.collisions if c.agent_id in sel_ids
        ]
        self._cache: dict = {}

    # shared intermediates ------------------------------------------------

    def goal_dist(self):
        if "goal_dist" not in self._cache:
            self._cache["goal_dist"] = np.linalg.norm(
                self.robot_pos - self.goal, axis=1)
        return self._cache["goal_dist"]

    def person_surface_dist(self):
        """(K, M) surface distances robot<->each person, clamped >= 0."""
        if "psd" not in self._cache:
            d = np.linalg.norm(
                self.agent_pos - self.robot_pos[:, None, :], axis=2)
            d = d - self.agent_radius[None, :] - self.robot_radius
            self._cache["psd"] = np.maximum(d, 0.0)
        return self._cache["psd"]

    def closest_person_dist(self):
        if "cpd" not in self._cache:
            self._cache["cpd"] = self.person_surface_dist().min(axis=1)
        return self._cache["cpd"]

    def group_surface_dist(self):
        """(K,) distance to the nearest declared group's buffered hull."""
        if "gsd" in self._cache:
            return self._cache["gsd"]
        gids = sorted({g for g in self.group_ids if g >= 0})
        if not gids:
            self._cache["gsd"] = None
            return None
        K = len(self.t)
        out = np.empty(K)
        members_by_gid = {
            g: [m for m, gg in enumerate(self.group_ids) if gg == g] for g in gids
        }
        for k in range(K):
            p = (self.robot_pos[k, 0], self.robot_pos[k, 1])
            best = math.inf
            for g, members in members_by_gid.items():
                pts = [tuple(self.agent_pos[k, m]) for m in members]
                buffer_r = float(self.agent_radius[members].max())
                d = distance_to_hull(p, convex_hull(pts))
                d = max(d - buffer_r - self.robot_radius, 0.0)
                best = min(best, d)
            out[k] = best
        self._cache["gsd"] = out
        return out


def _absent(arrays: TraceArrays) -> MetricResult:
    return MetricResult(final=None, series=None)


# ---------------------------------------------------------------------------
# navigation metrics
# ---------------------------------------------------------------------------

def _reach_index(arrays):
    hit = np.nonzero(arrays.goal_dist() <= arrays.goal_radius)[0]
    return int(hit[0]) if hit.size else None


def m_time_to_reach_goal(a: TraceArrays) -> MetricResult:
    i = _reach_index(a)
    return MetricResult(final=float(a.t[i] if i is not None else a.t[-1]))


def m_path_length(a: TraceArrays) -> MetricResult:
    steps = np.linalg.norm(np.diff(a.robot_pos, axis=0), axis=1)
    return MetricResult(final=float(steps.sum()))


def m_cumulative_heading_changes(a: TraceArrays) -> MetricResult:
    diff = np.diff(a.robot_heading)
    diff = (diff + np.pi) % (2.0 * np.pi) - np.pi
    steps = np.abs(diff)
    series = [0.0] + [float(x) for x in steps]
    return MetricResult(final=float(steps.sum()), series=series)


def m_completed(a: TraceArrays) -> MetricResult:
    return MetricResult(final=1.0 if _reach_index(a) is not None else 0.0)


def m_min_dist_to_target(a: TraceArrays) -> MetricResult:
    return MetricResult(final=float(a.goal_dist().min()))


def m_final_dist_to_target(a: TraceArrays) -> MetricResult:
    return MetricResult(final=float(a.goal_dist()[-1]))


# ---------------------------------------------------------------------------
# people distances and proxemics
# ---------------------------------------------------------------------------

def m_avg_dist_to_closest_person(a: TraceArrays) -> MetricResult:
    if a.n_agents == 0:
        return _absent(a)
    d = a.closest_person_dist()
    return MetricResult(final=float(d.mean()), series=[float(x) for x in d])


def m_min_dist_to_people(a: TraceArrays) -> MetricResult:
    if a.n_agents == 0:
        return _absent(a)
    return MetricResult(final=float(a.closest_person_dist().min()))


def _zone_metric(dist_series, lo, hi):
    flags = (dist_series >= lo) & (dist_series < hi)
    pct = 100.0 * int(flags.sum()) / len(flags)
    return MetricResult(final=pct, series=[float(x) for x in flags])


def m_intimate_space_intrusions(a: TraceArrays) -> MetricResult:
    if a.n_agents == 0:
        return _absent(a)
    return _zone_metric(a.closest_person_dist(), -1.0, ZONE_INTIMATE)


def m_personal_space_intrusions(a: TraceArrays) -> MetricResult:
    if a.n_agents == 0:
        return _absent(a)
    return _zone_metric(a.closest_person_dist(), ZONE_INTIMATE, ZONE_PERSONAL)


def m_social_space_intrusions(a: TraceArrays) -> MetricResult:
    if a.n_agents == 0:
        return _absent(a)
    return _zone_metric(a.closest_person_dist(), ZONE_PERSONAL, math.inf)


def m_group_intimate(a: TraceArrays) -> MetricResult:
    d = a.group_surface_dist()
    if d is None:
        return _absent(a)
    return _zone_metric(d, -1.0, ZONE_INTIMATE)


def m_group_personal(a: TraceArrays) -> MetricResult:
    d = a.group_surface_dist()
    if d is None:
        return _absent(a)
    return _zone_metric(d, ZONE_INTIMATE, ZONE_PERSONAL)


def m_group_social(a: TraceArrays) -> MetricResult:
    d = a.group_surface_dist()
    if d is None:
        return _absent(a)
    return _zone_metric(d, ZONE_PERSONAL, math.inf)


# ---------------------------------------------------------------------------
# collisions and robot kinematics
# ---------------------------------------------------------------------------

def _collision_metric(a: TraceArrays, kind: str) -> MetricResult:
    times = {c.t for c in a.collisions if c.kind == kind}
    series = [1.0 if t in times else 0.0 for t in a.t]
    count = sum(1 for c in a.collisions if c.kind == kind)
    return MetricResult(final=float(count), series=series)


def m_robot_on_person_collisions(a: TraceArrays) -> MetricResult:
    return _collision_metric(a, ROBOT_ON_PERSON)


def m_person_on_robot_collisions(a: TraceArrays) -> MetricResult:
    return _collision_metric(a, PERSON_ON_ROBOT)


def m_time_not_moving(a: TraceArrays) -> MetricResult:
    flags = (np.abs(a.robot_v) < STOPPED_V) & (np.abs(a.robot_w) < STOPPED_W)
    return MetricResult(final=float(a.dt * int(flags.sum())),
                        series=[float(x) for x in flags])


def m_avg_robot_linear_speed(a: TraceArrays) -> MetricResult:
    return MetricResult(final=float(a.robot_v.mean()),
                        series=[float(x) for x in a.robot_v])


def m_avg_robot_angular_speed(a: TraceArrays) -> MetricResult:
    return MetricResult(final=float(np.abs(a.robot_w).mean()),
                        series=[float(x) for x in a.robot_w])


def m_avg_robot_acceleration(a: TraceArrays) -> MetricResult:
    if len(a.robot_v) < 2 or a.dt <= 0:
        return _absent(a)
    acc = np.diff(a.robot_v) / a.dt
    series = [0.0] + [float(x) for x in acc]
    return MetricResult(final=float(np.abs(acc).mean()), series=series)


def m_avg_robot_jerk(a: TraceArrays) -> MetricResult:
    if len(a.robot_v) < 3 or a.dt <= 0:
        return _absent(a)
    acc = np.diff(a.robot_v) / a.dt
    jerk = np.diff(acc) / a.dt
    series = [0.0, 0.0] + [float(x) for x in jerk]
    return MetricResult(final=float(np.abs(jerk).mean()), series=series)


# ---------------------------------------------------------------------------
# pedestrian speeds and force aggregates
# ---------------------------------------------------------------------------

def m_avg_pedestrians_velocity(a: TraceArrays) -> MetricResult:
    if a.n_agents == 0:
        return _absent(a)
    speed = np.linalg.norm(a.agent_vel, axis=2).mean(axis=1)
    return MetricResult(final=float(speed.mean()),
                        series=[float(x) for x in speed])


def m_avg_closest_pedestrian_velocity(a: TraceArrays) -> MetricResult:
    if a.n_agents == 0:
        return _absent(a)
    nearest = a.person_surface_dist().argmin(axis=1)
    speed = np.linalg.norm(a.agent_vel, axis=2)
    picked = speed[np.arange(len(nearest)), nearest]
    return MetricResult(final=float(picked.mean()),
                        series=[float(x) for x in picked])


def _force_series(a: TraceArrays):
    if "forces" in a._cache:
        return a._cache["forces"]
    on_agents = np.linalg.norm(a.force_robot_social, axis=2).sum(axis=1)
    on_robot = np.linalg.norm(a.force_to_robot.sum(axis=1), axis=1)
    obs_agents = np.linalg.norm(a.force_obstacle, axis=2).sum(axis=1)
    obs_robot = np.linalg.norm(a.robot_obstacle, axis=1)
    work = on_robot + obs_robot + on_agents
    a._cache["forces"] = (on_agents, on_robot, obs_agents, obs_robot, work)
    return a._cache["forces"]


def m_social_force_on_agents(a: TraceArrays) -> MetricResult:
    s = _force_series(a)[0]
    return MetricResult(final=float(s.mean()), series=[float(x) for x in s])


def m_social_force_on_robot(a: TraceArrays) -> MetricResult:
    s = _force_series(a)[1]
    return MetricResult(final=float(s.mean()), series=[float(x) for x in s])


def m_obstacle_force_on_agents(a: TraceArrays) -> MetricResult:
    s = _force_series(a)[2]
    return MetricResult(final=float(s.mean()), series=[float(x) for x in s])


def m_obstacle_force_on_robot(a: TraceArrays) -> MetricResult:
    s = _force_series(a)[3]
    return MetricResult(final=float(s.mean()), series=[float(x) for x in s])


def m_social_work(a: TraceArrays) -> MetricResult:
    s = _force_series(a)[4]
    return MetricResult(final=float(s.mean()), series=[float(x) for x in s])


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

METRICS: dict[str, MetricSpec] = {}


def register_metric(name, fn, unit="-", description="", has_series=True):
    """Add (or replace) a metric; report columns follow insertion order."""
    METRICS[name] = MetricSpec(name=name, unit=unit, description=description,
                               fn=fn, has_series=has_series)


for _name, _fn, _unit, _desc, _series in [
    ("time_to_reach_goal", m_time_to_reach_goal, "s",
     "time spent to reach the goal", False),
    ("path_length", m_path_length, "m",
     "length of the traveled robot path", False),
    ("cumulative_heading_changes", m_cumulative_heading_changes, "rad",
     "accumulated absolute heading change", True),
    ("avg_dist_to_closest_person", m_avg_dist_to_closest_person, "m",
     "average surface distance to the closest person", True),
    ("min_dist_to_people", m_min_dist_to_people, "m",
     "minimum surface distance to any person", False),
    ("intimate_space_intrusions", m_intimate_space_intrusions, "%",
     "share of time spent inside someone's intimate zone", True),
    ("personal_space_intrusions", m_personal_space_intrusions, "%",
     "share of time spent inside someone's personal zone", True),
    ("social+_space_intrusions", m_social_space_intrusions, "%",
     "share of time spent at social distance or farther", True),
    ("group_intimate_space_intrusions", m_group_intimate, "%",
     "share of time inside a walking group's intimate zone", True),
    ("group_personal_space_intrusions", m_group_personal, "%",
     "share of time inside a walking group's personal zone", True),
    ("group_social+_space_intrusions", m_group_social, "%",
     "share of time at social distance or farther from groups", True),
    ("completed", m_completed, "-",
     "whether the robot reached its goal in time", False),
    ("min_dist_to_target", m_min_dist_to_target, "m",
     "closest approach to the goal point", False),
    ("final_dist_to_target", m_final_dist_to_target, "m",
     "distance to the goal at the end of the run", False),
    ("robot_on_person_collisions", m_robot_on_person_collisions, "-",
     "contact episodes caused by the robot", True),
    ("person_on_robot_collisions", m_person_on_robot_collisions, "-",
     "contact episodes caused by a person", True),
    ("time_not_moving", m_time_not_moving, "s",
     "time spent effectively stopped", True),
    ("avg_robot_linear_speed", m_avg_robot_linear_speed, "m/s",
     "average robot linear speed", True),
    ("avg_robot_angular_speed", m_avg_robot_angular_speed, "rad/s",
     "average robot angular speed magnitude", True),
    ("avg_robot_acceleration", m_avg_robot_acceleration, "m/s^2",
     "average magnitude of the linear acceleration", True),
    ("avg_robot_jerk", m_avg_robot_jerk, "m/s^3",
     "average magnitude of the linear jerk", True),
    ("avg_pedestrians_velocity", m_avg_pedestrians_velocity, "m/s",
     "average speed over all pedestrians", True),
    ("avg_closest_pedestrian_velocity", m_avg_closest_pedestrian_velocity,
     "m/s", "average speed of the nearest pedestrian", True),
    ("social_force_on_agents", m_social_force_on_agents, "m/s^2",
     "robot-attributable social force summed over agents", True),
    ("social_force_on_robot", m_social_force_on_robot, "m/s^2",
     "total social force provoked by the agents on the robot", True),
    ("obstacle_force_on_agents", m_obstacle_force_on_agents, "m/s^2",
     "obstacle force summed over agents", True),
    ("obstacle_force_on_robot", m_obstacle_force_on_robot, "m/s^2",
     "obstacle force on the robot", True),
    ("social_work", m_social_work, "m/s^2",
     "social force on robot + obstacle force on robot + social force on agents",
     True),
]:
    register_metric(_name, _fn, _unit, _desc, _series)


# ---------------------------------------------------------------------------
# evaluation and reports
# ---------------------------------------------------------------------------

@dataclass
class Report:
    names: list
    overall: dict
    groups: dict = field(default_factory=dict)  # behavior -> {name: result}


def resolve_metric_names(selection) -> list:
    """Expand 'all'/None or validate an explicit metric name list."""
    if selection is None or selection == "all" or selection == ["all"]:
        return list(METRICS)
    unknown = [n for n in selection if n not in METRICS]
    if unknown:
        raise ValueError(
            f"unknown metrics {unknown}; known: {list(METRICS)}")
    return list(selection)


def evaluate(trace: SimTrace, metrics=None) -> Report:
    """Compute the selected metrics overall and per behavior group."""
    names = resolve_metric_names(metrics)
    overall_arrays = TraceArrays(trace)
    overall = {n: METRICS[n].fn(overall_arrays) for n in names}
    groups = {}
    for behavior in sorted(set(overall_arrays.behaviors)):
        arrays = TraceArrays(trace, behavior=behavior)
        groups[behavior] = {n: METRICS[n].fn(arrays) for n in names}
    return Report(names=names, overall=overall, groups=groups)


def _fmt(x) -> str:
    if x is None:
        return "nan"
    return f"{x:.6g}"


def _write_final(path, names, values):
    lines = ["\t".join(names), "\t".join(_fmt(values[n].final) for n in names)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_steps(path, names, values, times):
    cols = [n for n in names if values[n].series is not None]
    lines = ["\t".join(["time"] + cols)]
    for k, t in enumerate(times):
        row = [_fmt(t)] + [_fmt(values[n].series[k]) for n in cols]
        lines.append("\t".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_reports(report: Report, trace: SimTrace, out_dir) -> list:
    """Write metrics.tsv / metrics_steps.tsv plus one pair per behavior."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    times = [tk.t for tk in trace.ticks]
    written = []

    p = out / "metrics.tsv"
    _write_final(p, report.names, report.overall)
    written.append(p)
    p = out / "metrics_steps.tsv"
    _write_steps(p, report.names, report.overall, times)
    written.append(p)
    for behavior, values in sorted(report.groups.items()):
        p = out / f"metrics_{behavior}.tsv"
        _write_final(p, report.names, values)
        written.append(p)
        p = out / f"metrics_steps_{behavior}.tsv"
        _write_steps(p, report.names, values, times)
        written.append(p)
    return written
