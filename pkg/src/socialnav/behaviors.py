"""Pedestrian reaction behaviors, built as reactive behavior trees.

Six behaviors ship with the simulator:

* ``regular``     — walks its goal queue; the robot is one more pedestrian.
* ``impassive``   — walks its goal queue; the robot is furniture (a point
  obstacle), never a social neighbor.
* ``surprised``   — stops in place and faces the robot while it is visible.
* ``curious``     — abandons its goal to approach the robot up to a
  stand-off distance at reduced speed, losing interest after a timeout.
* ``scared``      — keeps walking but at reduced speed with an extra radial
  push away from the robot.
* ``threatening`` — plants itself in front of the robot (a stand-off goal
  ahead of the robot's motion) until a timeout.

Reactions run as *episodes*: one starts when the robot becomes visible
(range + field-of-view + line-of-sight), ends when its timer expires or
the robot has been out of sight for a hold time, and cannot restart until
the robot has left visibility again (re-arming).  Each tick the tree
writes a fresh set of directives that the world applies to the agent's
force assembly and integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bt import RUNNING, SUCCESS, Node, build_tree
from .geometry import Vec2, unit, wrap_angle

# neighbor policies: how the agent's force assembly treats the robot
ROBOT_AS_PEDESTRIAN = "pedestrian"
ROBOT_AS_OBSTACLE = "obstacle"
ROBOT_IGNORED = "ignore"

BEHAVIOR_NAMES = (
    "regular",
    "impassive",
    "surprised",
    "curious",
    "scared",
    "threatening",
)

BEHAVIOR_SUMMARIES = {
    "regular": "walks its goals; treats the robot as one more pedestrian",
    "impassive": "walks its goals; treats the robot as a point obstacle",
    "surprised": "stops and faces the robot while it is visible",
    "curious": "approaches the robot to a stand-off, loses interest on a timer",
    "scared": "keeps walking slower with an extra push away from the robot",
    "threatening": "blocks the robot's path from a stand-off ahead, on a timer",
}

# minimum robot speed for its motion direction to be meaningful
_MOVING_EPS = 0.05


@dataclass
class BehaviorParams:
    """Per-agent reaction tuning; defaults match the shipped scenarios."""

    detection_range: float = 10.0
    fov: float = 2.0 * math.pi * (2.0 / 3.0)
    require_los: bool = True
    lost_hold_time: float = 2.0
    timer_jitter: float = 0.0  # fraction of the timeout, drawn once per episode
    curious_timeout: float = 30.0
    curious_standoff: float = 1.5
    curious_speed_scale: float = 0.4
    scared_speed_scale: float = 0.6
    scared_repulsion_scale: float = 2.0
    threatening_timeout: float = 40.0
    threatening_standoff: float = 1.4


@dataclass
class Directives:
    """What the behavior asks of the world for one tick."""

    neighbor_policy: str = ROBOT_AS_PEDESTRIAN
    goal_override: Vec2 | None = None
    speed_scale: float = 1.0
    max_speed_scale: float = 1.0
    extra_force: Vec2 = (0.0, 0.0)
    robot_repulsion_scale: float = 0.0  # radial push = scale * |robot social summand|
    heading_override: float | None = None
    freeze: bool = False


@dataclass
class EpisodeState:
    """Reaction episode bookkeeping, persistent across ticks."""

    active: bool = False
    started_at: float = 0.0
    timeout: float | None = None
    armed: bool = True
    last_visible_t: float | None = None
    ever_started: bool = False


@dataclass
class BehaviorContext:
    """Inputs and outputs of one behavior tick."""

    t: float
    dt: float
    pos: Vec2
    vel: Vec2
    heading: float
    robot_pos: Vec2
    robot_vel: Vec2
    robot_heading: float
    robot_visible: bool
    params: BehaviorParams
    state: EpisodeState
    rng: np.random.Generator
    directives: Directives = field(default_factory=Directives)


def blocking_goal(robot_pos: Vec2, robot_vel: Vec2, robot_heading: float,
                  standoff: float) -> Vec2:
    """Point ``standoff`` meters ahead of the robot's motion.

    Uses the velocity direction while the robot is actually moving,
    otherwise the direction it is facing.
    """
    if math.hypot(*robot_vel) > _MOVING_EPS:
        dx, dy = unit(robot_vel[0], robot_vel[1])
    else:
        dx, dy = math.cos(robot_heading), math.sin(robot_heading)
    return (robot_pos[0] + standoff * dx, robot_pos[1] + standoff * dy)


def approach_goal(agent_pos: Vec2, robot_pos: Vec2, standoff: float) -> Vec2:
    """Point ``standoff`` meters from the robot on the agent's side."""
    dx, dy = unit(agent_pos[0] - robot_pos[0], agent_pos[1] - robot_pos[1])
    if dx == 0.0 and dy == 0.0:
        dx, dy = 1.0, 0.0
    return (robot_pos[0] + standoff * dx, robot_pos[1] + standoff * dy)


# ---------------------------------------------------------------------------
# tree leaves
# ---------------------------------------------------------------------------

def _cond_robot_visible(ctx: BehaviorContext) -> bool:
    return ctx.robot_visible


def _cond_episode_active(ctx: BehaviorContext) -> bool:
    return ctx.state.active


def _cond_episode_armed(ctx: BehaviorContext) -> bool:
    return ctx.state.armed


def _cond_episode_over(ctx: BehaviorContext) -> bool:
    st = ctx.state
    if st.timeout is not None and ctx.t - st.started_at >= st.timeout:
        return True
    if st.last_visible_t is None:
        return True
    return ctx.t - st.last_visible_t >= ctx.params.lost_hold_time


def _make_start_episode(timeout_of: Callable[[BehaviorParams], float | None]):
    def start(ctx: BehaviorContext):
        timeout = timeout_of(ctx.params)
        if timeout is not None and ctx.params.timer_jitter > 0.0:
            spread = ctx.params.timer_jitter * timeout
            timeout += float(ctx.rng.uniform(-spread, spread))
        ctx.state.active = True
        ctx.state.started_at = ctx.t
        ctx.state.timeout = timeout
        ctx.state.armed = False
        ctx.state.ever_started = True
        return SUCCESS

    return start


def _act_end_episode(ctx: BehaviorContext):
    ctx.state.active = False
    ctx.state.timeout = None
    return SUCCESS


def _act_follow_goals(ctx: BehaviorContext):
    # defaults already mean "walk the queue as a regular pedestrian"
    return RUNNING


def _act_follow_goals_impassive(ctx: BehaviorContext):
    ctx.directives.neighbor_policy = ROBOT_AS_OBSTACLE
    return RUNNING


def _act_face_robot(ctx: BehaviorContext):
    d = ctx.directives
    d.freeze = True
    d.speed_scale = 0.0
    d.heading_override = math.atan2(
        ctx.robot_pos[1] - ctx.pos[1], ctx.robot_pos[0] - ctx.pos[0]
    )
    return RUNNING


def _act_approach_robot(ctx: BehaviorContext):
    d = ctx.directives
    d.goal_override = approach_goal(ctx.pos, ctx.robot_pos, ctx.params.curious_standoff)
    d.speed_scale = ctx.params.curious_speed_scale
    return RUNNING


def _act_flee_robot(ctx: BehaviorContext):
    d = ctx.directives
    d.speed_scale = ctx.params.scared_speed_scale
    d.max_speed_scale = ctx.params.scared_speed_scale
    d.robot_repulsion_scale = ctx.params.scared_repulsion_scale
    return RUNNING


def _act_block_robot(ctx: BehaviorContext):
    d = ctx.directives
    d.goal_override = blocking_goal(
        ctx.robot_pos, ctx.robot_vel, ctx.robot_heading,
        ctx.params.threatening_standoff,
    )
    return RUNNING


CONDITIONS: dict[str, Callable] = {
    "robot_visible": _cond_robot_visible,
    "episode_active": _cond_episode_active,
    "episode_armed": _cond_episode_armed,
    "episode_over": _cond_episode_over,
}

ACTIONS: dict[str, Callable] = {
    "follow_goals": _act_follow_goals,
    "follow_goals_impassive": _act_follow_goals_impassive,
    "start_surprised": _make_start_episode(lambda p: None),
    "start_curious": _make_start_episode(lambda p: p.curious_timeout),
    "start_scared": _make_start_episode(lambda p: None),
    "start_threatening": _make_start_episode(lambda p: p.threatening_timeout),
    "end_episode": _act_end_episode,
    "face_robot": _act_face_robot,
    "approach_robot": _act_approach_robot,
    "flee_robot": _act_flee_robot,
    "block_robot": _act_block_robot,
}


def _episode_tree(start_action: str, react_action: str) -> dict:
    """Template shared by the four reacting behaviors."""
    return {
        "type": "fallback",
        "children": [
            {
                "type": "sequence",
                "children": [
                    {"type": "condition", "name": "episode_active"},
                    {
                        "type": "fallback",
                        "children": [
                            {
                                "type": "sequence",
                                "children": [
                                    {"type": "condition", "name": "episode_over"},
                                    {"type": "action", "name": "end_episode"},
                                ],
                            },
                            {"type": "action", "name": react_action},
                        ],
                    },
                ],
            },
            {
                "type": "sequence",
                "children": [
                    {"type": "condition", "name": "robot_visible"},
                    {"type": "condition", "name": "episode_armed"},
                    {"type": "action", "name": start_action},
                    {"type": "action", "name": react_action},
                ],
            },
            {"type": "action", "name": "follow_goals"},
        ],
    }


TREE_DESCRIPTIONS: dict[str, dict] = {
    "regular": {"type": "action", "name": "follow_goals"},
    "impassive": {"type": "action", "name": "follow_goals_impassive"},
    "surprised": _episode_tree("start_surprised", "face_robot"),
    "curious": _episode_tree("start_curious", "approach_robot"),
    "scared": _episode_tree("start_scared", "flee_robot"),
    "threatening": _episode_tree("start_threatening", "block_robot"),
}


class Behavior:
    """One agent's behavior: a tree plus its persistent episode state."""

    def __init__(self, kind: str, params: BehaviorParams | None = None,
                 tree: Node | None = None):
        if kind not in BEHAVIOR_NAMES and tree is None:
            raise ValueError(
                f"unknown behavior {kind!r}; known: {list(BEHAVIOR_NAMES)}"
            )
        self.kind = kind
        self.params = params or BehaviorParams()
        self.tree = tree or build_tree(TREE_DESCRIPTIONS[kind], CONDITIONS, ACTIONS)
        self.state = EpisodeState()

    def tick(self, ctx: BehaviorContext) -> Directives:
        """Advance visibility bookkeeping, run the tree, return directives."""
        ctx.params = self.params
        ctx.state = self.state
        if ctx.robot_visible:
            self.state.last_visible_t = ctx.t
        elif not self.state.active:
            # robot out of sight while idle: the next sighting may react
            self.state.armed = True
        self.tree.tick(ctx)
        return ctx.directives


def robot_visible(agent_pos: Vec2, agent_heading: float, robot_pos: Vec2,
                  params: BehaviorParams, obstacles=None) -> bool:
    """Detection test: range, field of view, and optional line of sight."""
    dx = robot_pos[0] - agent_pos[0]
    dy = robot_pos[1] - agent_pos[1]
    if math.hypot(dx, dy) > params.detection_range:
        return False
    bearing = wrap_angle(math.atan2(dy, dx) - agent_heading)
    if abs(bearing) > params.fov / 2.0:
        return False
    if params.require_los and obstacles is not None and obstacles.blocks(agent_pos, robot_pos):
        return False
    return True
