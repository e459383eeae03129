"""World state, the fixed-step simulation loop, and the trace record.

One ``World.step()`` advances exactly ``dt`` seconds through a fixed phase
order:

1. per-agent robot visibility (range / field of view / line of sight);
2. behavior-tree ticks producing per-agent directives;
3. force assembly for every agent from the *pre-step* states (the robot's
   would-be social/obstacle forces are computed alongside, robot treated
   as a passive social-force body);
4. agent integration (semi-implicit Euler, speed clamp, freeze holds);
5. planner query and unicycle integration of the robot (commands rate-
   limited by the acceleration caps);
6. collision detection (one event per contiguous contact episode,
   attributed by who was moving into whom at onset);
7. goal-queue advancement;
8. trace snapshot append.

Each appended tick therefore carries the post-step state together with
the forces that were applied during the step; the initial t=0 tick
carries zero forces.  Time is k*dt exactly.  A (scenario, seed, backend)
triple fully determines the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .behaviors import (
    ROBOT_AS_OBSTACLE,
    ROBOT_AS_PEDESTRIAN,
    Behavior,
    BehaviorContext,
    Directives,
    robot_visible,
)
from .geometry import Vec2, dist, unit, wrap_angle
from .sfm import (
    ForceBreakdown,
    ObstacleMap,
    SfmParams,
    desired_force,
    group_force,
    integrate,
    obstacle_force,
    social_force,
)

ROBOT_ON_PERSON = "robot_on_person"
PERSON_ON_ROBOT = "person_on_robot"


class VelocityCommand(NamedTuple):
    v: float
    w: float


@dataclass
class GoalQueue:
    """Ordered waypoints; cyclic queues wrap, finite ones exhaust to None."""

    goals: list
    radius: float = 0.3
    cyclic: bool = True
    index: int = 0

    def current(self):
        if self.index < len(self.goals):
            return tuple(self.goals[self.index])
        return None

    def advance_if_reached(self, pos: Vec2) -> bool:
        cur = self.current()
        if cur is None or dist(pos, cur) > self.radius:
            return False
        self.index += 1
        if self.index >= len(self.goals) and self.cyclic and self.goals:
            self.index = 0
        return True


@dataclass
class AgentInit:
    """Immutable description of one pedestrian at world construction."""

    id: int
    pos: Vec2
    behavior: Behavior
    goals: GoalQueue
    heading: float = 0.0
    radius: float = 0.3
    group_id: int = -1
    sfm: SfmParams = field(default_factory=SfmParams)


@dataclass
class RobotInit:
    pos: Vec2
    goal: Vec2
    heading: float = 0.0
    radius: float = 0.3
    goal_radius: float = 0.3
    max_v: float = 0.6
    max_w: float = 1.2
    max_acc_v: float = 1.0
    max_acc_w: float = 2.5


@dataclass
class AgentState:
    """Per-tick snapshot of one pedestrian."""

    id: int
    pos: Vec2
    vel: Vec2
    heading: float
    radius: float
    behavior: str
    group_id: int
    visible: bool = False
    forces: ForceBreakdown = field(default_factory=ForceBreakdown)
    to_robot_social: Vec2 = (0.0, 0.0)  # this agent's push on the robot


@dataclass
class RobotState:
    """Per-tick snapshot of the robot."""

    pos: Vec2
    heading: float
    v: float
    w: float
    vel: Vec2  # realized displacement velocity
    radius: float
    social_force: Vec2 = (0.0, 0.0)  # total social push from all agents
    obstacle_force: Vec2 = (0.0, 0.0)


@dataclass
class CollisionEvent:
    t: float
    agent_id: int
    kind: str  # ROBOT_ON_PERSON or PERSON_ON_ROBOT


@dataclass
class SimTick:
    t: float
    robot: RobotState
    agents: tuple
    collisions: tuple = ()


@dataclass
class SimTrace:
    dt: float
    goal: Vec2
    goal_radius: float
    ticks: list = field(default_factory=list)
    scenario: str = ""
    planner: str = ""
    seed: int = 0
    completed: bool = False

    @property
    def duration(self) -> float:
        return self.ticks[-1].t if self.ticks else 0.0


@dataclass(frozen=True)
class AgentView:
    pos: Vec2
    vel: Vec2
    radius: float


@dataclass(frozen=True)
class RobotView:
    pos: Vec2
    heading: float
    v: float
    w: float
    radius: float
    goal: Vec2
    goal_radius: float
    max_v: float
    max_w: float
    max_acc_v: float
    max_acc_w: float


@dataclass(frozen=True)
class Observation:
    """Read-only planner input: kinematics only, no pedestrian intent."""

    t: float
    dt: float
    robot: RobotView
    agents: tuple
    obstacles: ObstacleMap


class World:
    """Headless simulation of one robot run among reactive pedestrians."""

    def __init__(self, obstacles: ObstacleMap, agents: list, robot: RobotInit,
                 planner: Callable | None = None, planner_cfg=None,
                 dt: float = 0.05, max_time: float = 120.0, seed: int = 0,
                 scenario_name: str = "", planner_name: str = ""):
        self.obstacles = obstacles
        self.dt = dt
        self.max_time = max_time
        self.seed = seed
        self.planner = planner
        self.planner_cfg = planner_cfg
        self.degeneracies = 0

        self._robot_spec = robot
        self.robot_pos = tuple(robot.pos)
        self.robot_heading = robot.heading
        self.robot_v = 0.0
        self.robot_w = 0.0
        self.robot_vel = (0.0, 0.0)
        self.robot_sfm = SfmParams()  # agent-default params for the passive body

        self.agents = agents
        self._pos = [tuple(a.pos) for a in agents]
        self._vel = [(0.0, 0.0) for _ in agents]
        self._heading = [a.heading for a in agents]
        self._in_contact = set()

        seq = np.random.SeedSequence([seed, len(agents)])
        self._agent_rng = [np.random.default_rng(s) for s in seq.spawn(max(len(agents), 1))]

        self.tick_index = 0
        self.completed = False
        self.trace = SimTrace(
            dt=dt, goal=tuple(robot.goal), goal_radius=robot.goal_radius,
            scenario=scenario_name, planner=planner_name, seed=seed,
        )
        self._append_snapshot(
            forces=[ForceBreakdown() for _ in agents],
            to_robot=[(0.0, 0.0) for _ in agents],
            robot_social=(0.0, 0.0), robot_obstacle=(0.0, 0.0),
            visible=[False for _ in agents], collisions=(),
        )

    # -- queries ----------------------------------------------------------

    @property
    def t(self) -> float:
        return self.tick_index * self.dt

    def observation(self) -> Observation:
        r = self._robot_spec
        return Observation(
            t=self.t,
            dt=self.dt,
            robot=RobotView(
                pos=self.robot_pos, heading=self.robot_heading,
                v=self.robot_v, w=self.robot_w, radius=r.radius,
                goal=tuple(r.goal), goal_radius=r.goal_radius,
                max_v=r.max_v, max_w=r.max_w,
                max_acc_v=r.max_acc_v, max_acc_w=r.max_acc_w,
            ),
            agents=tuple(
                AgentView(pos=self._pos[i], vel=self._vel[i], radius=a.radius)
                for i, a in enumerate(self.agents)
            ),
            obstacles=self.obstacles,
        )

    # -- stepping ---------------------------------------------------------

    def step(self):
        """Advance the world by one dt (phases documented in the module)."""
        n = len(self.agents)
        t_now = self.t

        # (1) visibility from the pre-step states
        visible = [
            robot_visible(self._pos[i], self._heading[i], self.robot_pos,
                          self.agents[i].behavior.params, self.obstacles)
            for i in range(n)
        ]

        # (2) behavior ticks -> directives
        directives: list[Directives] = []
        for i, a in enumerate(self.agents):
            ctx = BehaviorContext(
                t=t_now, dt=self.dt,
                pos=self._pos[i], vel=self._vel[i], heading=self._heading[i],
                robot_pos=self.robot_pos, robot_vel=self.robot_vel,
                robot_heading=self.robot_heading,
                robot_visible=visible[i],
                params=a.behavior.params, state=a.behavior.state,
                rng=self._agent_rng[i],
                directives=Directives(),
            )
            directives.append(a.behavior.tick(ctx))

        # (3) force assembly from pre-step states
        forces, to_robot = self._assemble_forces(directives)
        robot_social_total, robot_obstacle = self._robot_body_forces(to_robot)

        # (4) integrate agents
        for i, a in enumerate(self.agents):
            d = directives[i]
            if d.freeze:
                self._vel[i] = (0.0, 0.0)
                if d.heading_override is not None:
                    self._heading[i] = d.heading_override
                continue
            max_speed = a.sfm.max_speed * d.max_speed_scale
            pos, vel, heading = integrate(
                self._pos[i], self._vel[i], forces[i].total, self.dt,
                max_speed, heading=self._heading[i],
            )
            self._pos[i], self._vel[i], self._heading[i] = pos, vel, heading
            if d.heading_override is not None:
                self._heading[i] = d.heading_override

        # (5) robot command and unicycle integration
        if self.planner is not None:
            obs = self.observation()
            cmd = self.planner(obs, self.planner_cfg)
            self._apply_command(cmd.v, cmd.w)
        else:
            self.robot_vel = (0.0, 0.0)

        # (6) collisions on the post-step states
        collisions = self._detect_collisions(t_now + self.dt)

        # (7) goal queues (paused while a behavior overrides the goal)
        for i, a in enumerate(self.agents):
            if directives[i].goal_override is None and not directives[i].freeze:
                a.goals.advance_if_reached(self._pos[i])

        # (8) snapshot
        self.tick_index += 1
        self._append_snapshot(forces, to_robot, robot_social_total,
                              robot_obstacle, visible, collisions)

        if dist(self.robot_pos, self.trace.goal) <= self.trace.goal_radius:
            self.completed = True
            self.trace.completed = True

    def run(self) -> SimTrace:
        """Step until the robot reaches its goal or max_time elapses."""
        max_ticks = int(round(self.max_time / self.dt))
        while not self.completed and self.tick_index < max_ticks:
            self.step()
        return self.trace

    # -- internals --------------------------------------------------------

    def _assemble_forces(self, directives):
        n = len(self.agents)
        forces: list[ForceBreakdown] = []
        to_robot: list[Vec2] = []
        for i, a in enumerate(self.agents):
            d = directives[i]
            # social neighbors: all other agents, plus the robot when the
            # behavior treats it as a pedestrian
            npos = [self._pos[j] for j in range(n) if j != i]
            nvel = [self._vel[j] for j in range(n) if j != i]
            robot_index = None
            if d.neighbor_policy == ROBOT_AS_PEDESTRIAN:
                robot_index = len(npos)
                npos.append(self.robot_pos)
                nvel.append(self.robot_vel)
            social, robot_part, degen = social_force(
                self._pos[i], self._vel[i],
                np.asarray(npos, dtype=np.float64).reshape(-1, 2),
                np.asarray(nvel, dtype=np.float64).reshape(-1, 2),
                a.sfm, robot_index=robot_index,
            )
            self.degeneracies += degen

            motion_dir = self._vel[i] if math.hypot(*self._vel[i]) > 1e-9 else (
                math.cos(self._heading[i]), math.sin(self._heading[i]))
            obstacle, odegen = obstacle_force(
                self._pos[i], a.radius, self.obstacles, a.sfm, motion_dir)
            self.degeneracies += odegen
            if d.neighbor_policy == ROBOT_AS_OBSTACLE:
                ofx, ofy = self._robot_as_point_obstacle(i, a)
                obstacle = (obstacle[0] + ofx, obstacle[1] + ofy)

            goal = d.goal_override if d.goal_override is not None else a.goals.current()
            desired = desired_force(
                self._pos[i], self._vel[i], goal,
                a.sfm.desired_speed * d.speed_scale, a.sfm.relaxation_time,
            )

            group = (0.0, 0.0)
            if a.group_id >= 0:
                mates = [self._pos[j] for j in range(n)
                         if j != i and self.agents[j].group_id == a.group_id]
                if mates:
                    group = group_force(self._pos[i], self._vel[i],
                                        self._heading[i], mates, a.sfm)

            # behavior extras are robot- or behavior-attributable social terms
            extra = d.extra_force
            if d.robot_repulsion_scale > 0.0:
                away = unit(self._pos[i][0] - self.robot_pos[0],
                            self._pos[i][1] - self.robot_pos[1])
                mag = d.robot_repulsion_scale * math.hypot(*robot_part)
                extra = (extra[0] + mag * away[0], extra[1] + mag * away[1])
                robot_part = (robot_part[0] + mag * away[0],
                              robot_part[1] + mag * away[1])
            social = (social[0] + extra[0], social[1] + extra[1])

            forces.append(ForceBreakdown(
                desired=desired, social=social, obstacle=obstacle,
                group=group, robot_social=robot_part,
            ))
            to_robot.append(self._agent_push_on_robot(i, a))
        return forces, to_robot

    def _robot_as_point_obstacle(self, i, a) -> Vec2:
        dx = self._pos[i][0] - self.robot_pos[0]
        dy = self._pos[i][1] - self.robot_pos[1]
        d = math.hypot(dx, dy)
        if d < 1e-9:
            self.degeneracies += 1
            return (0.0, 0.0)
        mag = a.sfm.obstacle_force_factor * math.exp((a.radius - d) / a.sfm.obstacle_decay)
        return (mag * dx / d, mag * dy / d)

    def _agent_push_on_robot(self, i, a) -> Vec2:
        total, _, degen = social_force(
            self.robot_pos, self.robot_vel,
            np.asarray([self._pos[i]]), np.asarray([self._vel[i]]),
            self.robot_sfm,
        )
        self.degeneracies += degen
        return total

    def _robot_body_forces(self, to_robot):
        total = (
            sum(f[0] for f in to_robot),
            sum(f[1] for f in to_robot),
        )
        motion_dir = self.robot_vel if math.hypot(*self.robot_vel) > 1e-9 else (
            math.cos(self.robot_heading), math.sin(self.robot_heading))
        obstacle, degen = obstacle_force(
            self.robot_pos, self._robot_spec.radius, self.obstacles,
            self.robot_sfm, motion_dir)
        self.degeneracies += degen
        return total, obstacle

    def _apply_command(self, v: float, w: float):
        r = self._robot_spec
        dv = r.max_acc_v * self.dt
        dw = r.max_acc_w * self.dt
        v = min(max(v, self.robot_v - dv), self.robot_v + dv)
        w = min(max(w, self.robot_w - dw), self.robot_w + dw)
        v = min(max(v, 0.0), r.max_v)
        w = min(max(w, -r.max_w), r.max_w)
        old_heading = self.robot_heading
        self.robot_vel = (v * math.cos(old_heading), v * math.sin(old_heading))
        self.robot_pos = (
            self.robot_pos[0] + self.robot_vel[0] * self.dt,
            self.robot_pos[1] + self.robot_vel[1] * self.dt,
        )
        self.robot_heading = wrap_angle(old_heading + w * self.dt)
        self.robot_v = v
        self.robot_w = w

    def _detect_collisions(self, t):
        events = []
        r = self._robot_spec
        for i, a in enumerate(self.agents):
            contact = dist(self.robot_pos, self._pos[i]) < r.radius + a.radius
            if contact and i not in self._in_contact:
                self._in_contact.add(i)
                events.append(CollisionEvent(t=t, agent_id=a.id,
                                             kind=self._attribute(i)))
            elif not contact:
                self._in_contact.discard(i)
        return tuple(events)

    def _attribute(self, i) -> str:
        """Who moved into whom at contact onset (velocity components)."""
        ex, ey = unit(self._pos[i][0] - self.robot_pos[0],
                      self._pos[i][1] - self.robot_pos[1])
        robot_into = self.robot_vel[0] * ex + self.robot_vel[1] * ey
        agent_into = -(self._vel[i][0] * ex + self._vel[i][1] * ey)
        return ROBOT_ON_PERSON if robot_into > agent_into else PERSON_ON_ROBOT

    def _append_snapshot(self, forces, to_robot, robot_social, robot_obstacle,
                         visible, collisions):
        agents = tuple(
            AgentState(
                id=a.id, pos=self._pos[i], vel=self._vel[i],
                heading=self._heading[i], radius=a.radius,
                behavior=a.behavior.kind, group_id=a.group_id,
                visible=visible[i], forces=forces[i],
                to_robot_social=to_robot[i],
            )
            for i, a in enumerate(self.agents)
        )
        robot = RobotState(
            pos=self.robot_pos, heading=self.robot_heading,
            v=self.robot_v, w=self.robot_w, vel=self.robot_vel,
            radius=self._robot_spec.radius,
            social_force=robot_social, obstacle_force=robot_obstacle,
        )
        self.trace.ticks.append(SimTick(
            t=self.tick_index * self.dt, robot=robot, agents=agents,
            collisions=collisions,
        ))


# ---------------------------------------------------------------------------
# trace dump
# ---------------------------------------------------------------------------

_COLL_CODE = {None: 0, ROBOT_ON_PERSON: 1, PERSON_ON_ROBOT: 2}


def trace_columns(n_agents: int) -> list:
    cols = ["t", "r_px", "r_py", "r_heading", "r_v", "r_w", "r_vx", "r_vy",
            "r_radius", "r_goal_x", "r_goal_y", "r_goal_radius",
            "r_soc_fx", "r_soc_fy", "r_obs_fx", "r_obs_fy"]
    for i in range(n_agents):
        p = f"a{i}_"
        cols += [p + c for c in (
            "id", "behavior", "group", "px", "py", "heading", "vx", "vy",
            "radius", "visible", "des_fx", "des_fy", "soc_fx", "soc_fy",
            "obs_fx", "obs_fy", "grp_fx", "grp_fy", "rob_fx", "rob_fy",
            "tor_fx", "tor_fy", "coll",
        )]
    return cols


def dump_trace(trace: SimTrace, path):
    """Write the full per-tick record as TSV (17 significant digits).

    Column discipline matches the metric reports: one header line, then
    one tab-separated row per tick.
    """
    if not trace.ticks:
        raise ValueError("cannot dump an empty trace")
    n = len(trace.ticks[0].agents)

    def f(x):
        return f"{x:.17g}"

    lines = ["\t".join(trace_columns(n))]
    for tick in trace.ticks:
        r = tick.robot
        row = [f(tick.t), f(r.pos[0]), f(r.pos[1]), f(r.heading), f(r.v),
               f(r.w), f(r.vel[0]), f(r.vel[1]), f(r.radius),
               f(trace.goal[0]), f(trace.goal[1]), f(trace.goal_radius),
               f(r.social_force[0]), f(r.social_force[1]),
               f(r.obstacle_force[0]), f(r.obstacle_force[1])]
        coll_by_agent = {c.agent_id: c.kind for c in tick.collisions}
        for a in tick.agents:
            fb = a.forces
            row += [str(a.id), a.behavior, str(a.group_id),
                    f(a.pos[0]), f(a.pos[1]), f(a.heading),
                    f(a.vel[0]), f(a.vel[1]), f(a.radius),
                    "1" if a.visible else "0",
                    f(fb.desired[0]), f(fb.desired[1]),
                    f(fb.social[0]), f(fb.social[1]),
                    f(fb.obstacle[0]), f(fb.obstacle[1]),
                    f(fb.group[0]), f(fb.group[1]),
                    f(fb.robot_social[0]), f(fb.robot_social[1]),
                    f(a.to_robot_social[0]), f(a.to_robot_social[1]),
                    str(_COLL_CODE.get(coll_by_agent.get(a.id), 0))]
        lines.append("\t".join(row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
