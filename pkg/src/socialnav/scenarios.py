"""Scenario files: schema, validation, built-in rooms, world construction.

A scenario is a YAML mapping with five sections (all optional fields take
the documented defaults)::

    name: passing
    world:
      bounds: [x_min, y_min, x_max, y_max]
      walls: [[[x1, y1], [x2, y2]], ...]   # extra segments
      boundary_walls: true                  # add the four bounds edges
    sim:  {dt: 0.05, max_time: 120.0, seed: 0}
    robot:
      planner: dwb
      planner_params: {}
      init_pose: [x, y, heading]
      goal: [x, y]
      goal_radius: 0.3
      radius: 0.3
      limits: {max_v: 0.6, max_w: 1.2, max_acc_v: 1.0, max_acc_w: 2.5}
    agents:
      - id: 0
        behavior: regular                   # one of the six behavior names
        init_pose: [x, y, heading]
        radius: 0.3
        desired_speed: 0.9
        max_speed: 1.5
        goals: [[x, y], ...]
        goal_radius: 0.3
        cyclic: true
        group_id: -1
        sfm: {}              # pedestrian-model overrides by field name
        behavior_params: {}  # reaction-tuning overrides by field name
    jitter: {pos: 0.0, speed: 0.0}          # seeded spawn variation
    metrics: all                             # or a list of metric names

Validation failures raise :class:`ScenarioError` naming the offending key
and, for name fields, listing the valid values.  ``load_scenario`` after
``save_scenario`` reproduces the config exactly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .behaviors import BEHAVIOR_NAMES, Behavior, BehaviorParams
from .evaluator import resolve_metric_names
from .geometry import dist
from .planners import DEFAULT_CONFIGS, PLANNERS, get_planner
from .sfm import ObstacleMap, SfmParams
from .world import AgentInit, GoalQueue, RobotInit, World


class ScenarioError(ValueError):
    """A scenario file failed validation; the message names the key."""


@dataclass
class WorldConfig:
    bounds: list = field(default_factory=lambda: [0.0, -5.0, 10.0, 5.0])
    walls: list = field(default_factory=list)
    boundary_walls: bool = False


@dataclass
class SimConfig:
    dt: float = 0.05
    max_time: float = 120.0
    seed: int = 0


@dataclass
class RobotLimits:
    max_v: float = 0.6
    max_w: float = 1.2
    max_acc_v: float = 1.0
    max_acc_w: float = 2.5


@dataclass
class RobotConfig:
    planner: str = "dwb"
    planner_params: dict = field(default_factory=dict)
    init_pose: list = field(default_factory=lambda: [0.5, 0.0, 0.0])
    goal: list = field(default_factory=lambda: [9.5, 0.0])
    goal_radius: float = 0.3
    radius: float = 0.3
    limits: RobotLimits = field(default_factory=RobotLimits)


@dataclass
class AgentConfig:
    id: int = 0
    behavior: str = "regular"
    init_pose: list = field(default_factory=lambda: [5.0, 0.0, 0.0])
    radius: float = 0.3
    desired_speed: float = 0.9
    max_speed: float = 1.5
    goals: list = field(default_factory=list)
    goal_radius: float = 0.3
    cyclic: bool = True
    group_id: int = -1
    sfm: dict = field(default_factory=dict)
    behavior_params: dict = field(default_factory=dict)


@dataclass
class JitterConfig:
    pos: float = 0.0    # normal sigma, meters, applied to agent starts
    speed: float = 0.0  # uniform +- fraction applied to desired speeds


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    world: WorldConfig = field(default_factory=WorldConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    robot: RobotConfig = field(default_factory=RobotConfig)
    agents: list = field(default_factory=list)
    jitter: JitterConfig = field(default_factory=JitterConfig)
    metrics: object = "all"


# ---------------------------------------------------------------------------
# dict <-> config
# ---------------------------------------------------------------------------

def _fields(cls):
    return {f.name for f in dataclasses.fields(cls)}


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ScenarioError(f"{where}: expected a mapping, got {type(data).__name__}")
    unknown = set(data) - _fields(cls)
    if unknown:
        raise ScenarioError(
            f"{where}: unknown key '{sorted(unknown)[0]}' "
            f"(valid: {', '.join(sorted(_fields(cls)))})")
    return cls(**data)


def config_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ScenarioError("scenario root: expected a mapping")
    unknown = set(data) - _fields(ScenarioConfig)
    if unknown:
        raise ScenarioError(
            f"scenario root: unknown key '{sorted(unknown)[0]}' "
            f"(valid: {', '.join(sorted(_fields(ScenarioConfig)))})")
    data = dict(data)
    cfg = ScenarioConfig(name=data.get("name", "scenario"))
    cfg.world = _build(WorldConfig, data.get("world", {}), "world")
    cfg.sim = _build(SimConfig, data.get("sim", {}), "sim")
    robot_data = dict(data.get("robot", {}))
    limits_data = robot_data.pop("limits", {})
    cfg.robot = _build(RobotConfig, robot_data, "robot")
    cfg.robot.limits = _build(RobotLimits, limits_data, "robot.limits")
    cfg.agents = []
    agents_data = data.get("agents", [])
    if not isinstance(agents_data, list):
        raise ScenarioError("agents: expected a list")
    for i, a in enumerate(agents_data):
        a = dict(a) if isinstance(a, dict) else a
        if isinstance(a, dict):
            a.setdefault("id", i)
        cfg.agents.append(_build(AgentConfig, a, f"agents[{i}]"))
    cfg.jitter = _build(JitterConfig, data.get("jitter", {}), "jitter")
    cfg.metrics = data.get("metrics", "all")
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "name": cfg.name,
        "world": dataclasses.asdict(cfg.world),
        "sim": dataclasses.asdict(cfg.sim),
        "robot": dataclasses.asdict(cfg.robot),
        "agents": [dataclasses.asdict(a) for a in cfg.agents],
        "jitter": dataclasses.asdict(cfg.jitter),
        "metrics": cfg.metrics,
    }


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _check_point(value, where, n=2):
    if (not isinstance(value, (list, tuple)) or len(value) != n
            or not all(isinstance(v, (int, float)) for v in value)):
        raise ScenarioError(f"{where}: expected {n} numbers, got {value!r}")


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every invariant; returns the config for chaining."""
    b = cfg.world.bounds
    _check_point(b, "world.bounds", n=4)
    if b[0] >= b[2] or b[1] >= b[3]:
        raise ScenarioError("world.bounds: min must be below max on both axes")
    for i, w in enumerate(cfg.world.walls):
        if not (isinstance(w, (list, tuple)) and len(w) == 2):
            raise ScenarioError(f"world.walls[{i}]: expected [[x1,y1],[x2,y2]]")
        _check_point(w[0], f"world.walls[{i}][0]")
        _check_point(w[1], f"world.walls[{i}][1]")

    if cfg.sim.dt <= 0:
        raise ScenarioError("sim.dt: must be positive")
    if cfg.sim.max_time <= 0:
        raise ScenarioError("sim.max_time: must be positive")

    if cfg.robot.planner not in PLANNERS:
        raise ScenarioError(
            f"robot.planner: unknown planner '{cfg.robot.planner}' "
            f"(valid: {', '.join(sorted(PLANNERS))})")
    _check_point(cfg.robot.init_pose, "robot.init_pose", n=3)
    _check_point(cfg.robot.goal, "robot.goal")
    _check_inside(cfg.robot.init_pose[:2], cfg.robot.radius, b, "robot.init_pose")

    try:
        resolve_metric_names(None if cfg.metrics == "all" else cfg.metrics)
    except ValueError as e:
        raise ScenarioError(f"metrics: {e}") from None

    seen_ids = set()
    bodies = [(cfg.robot.init_pose[:2], cfg.robot.radius, "robot")]
    for i, a in enumerate(cfg.agents):
        where = f"agents[{i}]"
        if a.id in seen_ids:
            raise ScenarioError(f"{where}.id: duplicate id {a.id}")
        seen_ids.add(a.id)
        if a.behavior not in BEHAVIOR_NAMES:
            raise ScenarioError(
                f"{where}.behavior: unknown behavior '{a.behavior}' "
                f"(valid: {', '.join(BEHAVIOR_NAMES)})")
        _check_point(a.init_pose, f"{where}.init_pose", n=3)
        if not a.goals:
            raise ScenarioError(f"{where}.goals: at least one goal required")
        for g, goal in enumerate(a.goals):
            _check_point(goal, f"{where}.goals[{g}]")
        if a.desired_speed <= 0 or a.max_speed < a.desired_speed:
            raise ScenarioError(
                f"{where}: need 0 < desired_speed <= max_speed")
        _check_inside(a.init_pose[:2], a.radius, b, f"{where}.init_pose")
        unknown = set(a.sfm) - _fields(SfmParams)
        if unknown:
            raise ScenarioError(
                f"{where}.sfm: unknown field '{sorted(unknown)[0]}'")
        unknown = set(a.behavior_params) - _fields(BehaviorParams)
        if unknown:
            raise ScenarioError(
                f"{where}.behavior_params: unknown field '{sorted(unknown)[0]}'")
        for pos, radius, who in bodies:
            need = radius + a.radius
            if dist(pos, a.init_pose[:2]) < need:
                raise ScenarioError(
                    f"{where}.init_pose: overlaps {who} "
                    f"(centers {dist(pos, a.init_pose[:2]):.3g} m apart, "
                    f"need >= {need:.3g})")
        bodies.append((a.init_pose[:2], a.radius, where))
    return cfg


def _check_inside(pos, radius, bounds, where):
    if not (bounds[0] + radius <= pos[0] <= bounds[2] - radius
            and bounds[1] + radius <= pos[1] <= bounds[3] - radius):
        raise ScenarioError(
            f"{where}: position {list(pos)} (radius {radius}) "
            f"is outside bounds {list(bounds)}")


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def load_scenario(path) -> ScenarioConfig:
    """Parse, default, and validate one scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ScenarioError(f"{path}: not valid YAML: {e}") from None
    if data is None:
        raise ScenarioError(f"{path}: empty scenario file")
    return validate_config(config_from_dict(data))


def save_scenario(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(
        yaml.safe_dump(config_to_dict(cfg), sort_keys=False),
        encoding="utf-8")


# ---------------------------------------------------------------------------
# built-in rooms (geometry approximate; sized by their direct path lengths)
# ---------------------------------------------------------------------------

def make_passing() -> ScenarioConfig:
    """Corridor with two oncoming walkers; direct robot path 15.2 m.

    Both walkers keep to their right-hand side of the corridor, one a few
    meters behind the other, so a polite pass means bending once to the
    robot's right and holding that line until both are behind.
    """
    return validate_config(config_from_dict({
        "name": "passing",
        "world": {"bounds": [0.0, -2.0, 16.0, 2.0], "boundary_walls": True},
        "robot": {"init_pose": [0.4, 0.0, 0.0], "goal": [15.6, 0.0]},
        "agents": [
            {"behavior": "regular", "init_pose": [11.0, 0.35, math.pi],
             "goals": [[0.6, 0.35]], "cyclic": False},
            {"behavior": "regular", "init_pose": [14.0, 0.4, math.pi],
             "goals": [[0.6, 0.4]], "cyclic": False},
        ],
        "jitter": {"pos": 0.1, "speed": 0.08},
    }))


def make_crossing() -> ScenarioConfig:
    """Open room, direct path 4.9 m, four walkers cutting across it.

    Two cross perpendicular to the robot's axis, two diagonally.
    """
    return validate_config(config_from_dict({
        "name": "crossing",
        "world": {"bounds": [0.0, -3.5, 7.0, 3.5], "boundary_walls": True},
        "robot": {"init_pose": [0.55, 0.0, 0.0], "goal": [5.45, 0.0]},
        "agents": [
            {"behavior": "regular", "init_pose": [2.4, 3.0, -math.pi / 2],
             "goals": [[2.4, -3.0]], "cyclic": False},
            {"behavior": "regular", "init_pose": [3.4, -3.0, math.pi / 2],
             "goals": [[3.4, 3.0]], "cyclic": False},
            {"behavior": "regular", "init_pose": [6.0, 2.6, 0.0],
             "goals": [[1.0, -2.6]], "cyclic": False},
            {"behavior": "regular", "init_pose": [5.2, -2.8, 0.0],
             "goals": [[0.8, 2.4]], "cyclic": False},
        ],
        "jitter": {"pos": 0.1, "speed": 0.08},
    }))


def make_combined() -> ScenarioConfig:
    """Large room mixing behaviors: a regular walker whose single crossing
    of the corridor happens far ahead of the robot, a curious approacher
    that notices the robot mid-route and tags along, and a threatening
    blocker that confronts it late.  All three start >= 8 m from the robot
    with goal lines crossing its corridor."""
    return validate_config(config_from_dict({
        "name": "combined",
        "world": {"bounds": [0.0, -5.0, 16.0, 5.0], "boundary_walls": True},
        "sim": {"max_time": 150.0},
        "robot": {"init_pose": [0.5, 0.0, 0.0], "goal": [15.5, 0.0]},
        "agents": [
            {"behavior": "regular", "init_pose": [9.5, -4.2, math.pi / 2],
             "goals": [[9.5, 4.2]], "cyclic": False},
            {"behavior": "curious", "init_pose": [7.5, -4.5, math.pi / 2],
             "goals": [[7.5, 4.5]], "cyclic": False,
             "behavior_params": {"detection_range": 7.0}},
            {"behavior": "threatening", "init_pose": [12.0, 4.0, -math.pi / 2],
             "goals": [[12.0, -4.0]], "cyclic": False,
             "behavior_params": {"detection_range": 7.0,
                                 "threatening_standoff": 0.65}},
        ],
        "jitter": {"pos": 0.1, "speed": 0.05},
    }))


BUILTIN_SCENARIOS = {
    "passing": make_passing,
    "crossing": make_crossing,
    "combined": make_combined,
}


def builtin_scenarios() -> dict:
    """Fresh configs for the three stock rooms."""
    return {name: make() for name, make in BUILTIN_SCENARIOS.items()}


def resolve_scenario(ref) -> ScenarioConfig:
    """A built-in name or a path to a scenario file."""
    if isinstance(ref, ScenarioConfig):
        return ref
    if ref in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[ref]()
    if Path(ref).exists():
        return load_scenario(ref)
    raise ScenarioError(
        f"scenario: '{ref}' is neither a built-in name "
        f"({', '.join(sorted(BUILTIN_SCENARIOS))}) nor an existing file")


# ---------------------------------------------------------------------------
# world construction
# ---------------------------------------------------------------------------

def _boundary_segments(b):
    x0, y0, x1, y1 = b
    return [((x0, y0), (x1, y0)), ((x1, y0), (x1, y1)),
            ((x1, y1), (x0, y1)), ((x0, y1), (x0, y0))]


def _jittered_starts(cfg: ScenarioConfig, seed: int):
    """Seeded spawn perturbations, re-drawn until placements stay valid."""
    starts = [tuple(a.init_pose[:2]) for a in cfg.agents]
    speeds = [a.desired_speed for a in cfg.agents]
    j = cfg.jitter
    if j.pos <= 0.0 and j.speed <= 0.0:
        return starts, speeds
    rng = np.random.default_rng(np.random.SeedSequence([seed, 97]))
    b = cfg.world.bounds
    placed = [(tuple(cfg.robot.init_pose[:2]), cfg.robot.radius)]
    out_pos = []
    for i, a in enumerate(cfg.agents):
        base = starts[i]
        pos = base
        for _ in range(30):
            cand = (base[0] + rng.normal(0.0, j.pos),
                    base[1] + rng.normal(0.0, j.pos)) if j.pos > 0 else base
            inside = (b[0] + a.radius <= cand[0] <= b[2] - a.radius
                      and b[1] + a.radius <= cand[1] <= b[3] - a.radius)
            clear = all(dist(cand, p) >= r + a.radius for p, r in placed)
            if inside and clear:
                pos = cand
                break
        placed.append((pos, a.radius))
        out_pos.append(pos)
    out_speed = []
    for i, a in enumerate(cfg.agents):
        factor = 1.0 + (j.speed * rng.uniform(-1.0, 1.0) if j.speed > 0 else 0.0)
        out_speed.append(max(0.1, speeds[i] * factor))
    return out_pos, out_speed


def build_world(cfg: ScenarioConfig, planner: str | None = None,
                seed: int | None = None) -> World:
    """Instantiate a runnable world from a validated config."""
    planner_name = planner if planner is not None else cfg.robot.planner
    plan_fn = get_planner(planner_name)
    params = cfg.robot.planner_params
    planner_cfg = DEFAULT_CONFIGS[planner_name](**params) if params else None
    run_seed = cfg.sim.seed if seed is None else seed

    segments = list(cfg.world.walls)
    if cfg.world.boundary_walls:
        segments += _boundary_segments(cfg.world.bounds)
    obstacles = ObstacleMap(
        [(tuple(p), tuple(q)) for p, q in segments])

    starts, speeds = _jittered_starts(cfg, run_seed)
    agents = []
    for i, a in enumerate(cfg.agents):
        sfm_kwargs = {"desired_speed": speeds[i], "max_speed": a.max_speed,
                      **a.sfm}
        agents.append(AgentInit(
            id=a.id,
            pos=starts[i],
            behavior=Behavior(a.behavior,
                              BehaviorParams(**a.behavior_params)),
            goals=GoalQueue([tuple(g) for g in a.goals],
                            radius=a.goal_radius, cyclic=a.cyclic),
            heading=a.init_pose[2],
            radius=a.radius,
            group_id=a.group_id,
            sfm=SfmParams(**sfm_kwargs),
        ))

    lim = cfg.robot.limits
    robot = RobotInit(
        pos=tuple(cfg.robot.init_pose[:2]), goal=tuple(cfg.robot.goal),
        heading=cfg.robot.init_pose[2], radius=cfg.robot.radius,
        goal_radius=cfg.robot.goal_radius, max_v=lim.max_v, max_w=lim.max_w,
        max_acc_v=lim.max_acc_v, max_acc_w=lim.max_acc_w,
    )
    return World(
        obstacles=obstacles, agents=agents, robot=robot, planner=plan_fn,
        planner_cfg=planner_cfg, dt=cfg.sim.dt, max_time=cfg.sim.max_time,
        seed=run_seed, scenario_name=cfg.name, planner_name=planner_name,
    )
