"""Social-force pedestrian model: force laws and the fixed-step integrator.

All forces are accelerations (unit-mass bodies).  Four laws compose a
pedestrian's motion:

* ``desired_force``  — relaxation toward the goal at a preferred speed;
* ``social_force``   — anisotropic exponential repulsion between bodies,
  with the robot-attributable summand isolated for the evaluator;
* ``obstacle_force`` — exponential repulsion from the nearest wall point;
* ``group_force``    — gaze / cohesion / repulsion terms keeping declared
  walking groups together.

Degenerate states (coincident bodies, a body exactly on a wall) never
raise: the affected summand is skipped or redirected and a degeneracy
count is reported so the world can track collision-state ticks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import Vec2, segments_intersect, unit, wrap_angle

_EPS = 1e-9


@dataclass
class SfmParams:
    """Pedestrian model parameters (one instance per agent)."""

    desired_speed: float = 0.9
    max_speed: float = 1.5
    relaxation_time: float = 0.5
    social_force_factor: float = 2.1
    gamma: float = 0.35
    n: float = 2.0
    n_prime: float = 3.0
    lam: float = 2.0
    obstacle_force_factor: float = 10.0
    obstacle_decay: float = 0.1
    group_gaze_factor: float = 3.0
    group_cohesion_factor: float = 2.0
    group_repulsion_factor: float = 1.0
    group_vision_angle: float = math.pi / 2.0
    group_repulsion_range: float = 0.8

    def replace(self, **kw) -> "SfmParams":
        vals = {**self.__dict__, **kw}
        return SfmParams(**vals)


@dataclass
class ForceBreakdown:
    """Per-tick force decomposition stored in the trace for one body."""

    desired: Vec2 = (0.0, 0.0)
    social: Vec2 = (0.0, 0.0)
    obstacle: Vec2 = (0.0, 0.0)
    group: Vec2 = (0.0, 0.0)
    robot_social: Vec2 = (0.0, 0.0)

    @property
    def total(self) -> Vec2:
        return (
            self.desired[0] + self.social[0] + self.obstacle[0] + self.group[0],
            self.desired[1] + self.social[1] + self.obstacle[1] + self.group[1],
        )


class ObstacleMap:
    """Static wall segments with nearest-point and line-of-sight queries."""

    def __init__(self, segments=()):
        segs = np.asarray(list(segments), dtype=np.float64)
        if segs.size == 0:
            segs = np.zeros((0, 4))
        self.segments = np.ascontiguousarray(segs.reshape(-1, 4))

    def __len__(self) -> int:
        return self.segments.shape[0]

    def nearest_point(self, pos: Vec2):
        """Closest wall point and its center distance (inf when no walls)."""
        qx, qy, d = kernels.nearest_segment_point(pos[0], pos[1], self.segments)
        return (qx, qy), d

    def distance(self, pos: Vec2) -> float:
        return self.nearest_point(pos)[1]

    def blocks(self, a: Vec2, b: Vec2) -> bool:
        """True when any wall segment cuts the sight line a-b."""
        for i in range(self.segments.shape[0]):
            s = self.segments[i]
            if segments_intersect(a, b, (s[0], s[1]), (s[2], s[3])):
                return True
        return False


def desired_force(pos: Vec2, vel: Vec2, goal: Vec2 | None,
                  desired_speed: float, relaxation_time: float) -> Vec2:
    """Relaxation toward the goal; pure braking when the goal is reached.

    ``goal=None`` means "no active goal": the body brakes to rest.
    """
    if goal is None:
        return (-vel[0] / relaxation_time, -vel[1] / relaxation_time)
    ex, ey = unit(goal[0] - pos[0], goal[1] - pos[1])
    if ex == 0.0 and ey == 0.0:
        return (-vel[0] / relaxation_time, -vel[1] / relaxation_time)
    return (
        (desired_speed * ex - vel[0]) / relaxation_time,
        (desired_speed * ey - vel[1]) / relaxation_time,
    )


def social_force(pos: Vec2, vel: Vec2, neighbors_pos, neighbors_vel,
                 params: SfmParams, robot_index: int | None = None):
    """Total social repulsion on one body plus the robot's isolated summand.

    Returns ``(total, robot_part, degenerate_count)``.  ``robot_index``
    names the row of the neighbor arrays that is the robot; its summand is
    returned separately so the evaluator can attribute it.
    """
    npos = np.ascontiguousarray(np.asarray(neighbors_pos, dtype=np.float64).reshape(-1, 2))
    nvel = np.ascontiguousarray(np.asarray(neighbors_vel, dtype=np.float64).reshape(-1, 2))
    m = npos.shape[0]
    if m == 0:
        return (0.0, 0.0), (0.0, 0.0), 0
    out = np.empty((m, 2))
    degen = kernels.pair_social_forces(
        float(pos[0]), float(pos[1]), float(vel[0]), float(vel[1]),
        npos, nvel,
        params.lam, params.gamma, params.n, params.n_prime,
        params.social_force_factor, out,
    )
    total = (float(out[:, 0].sum()), float(out[:, 1].sum()))
    if robot_index is None:
        robot_part = (0.0, 0.0)
    else:
        robot_part = (float(out[robot_index, 0]), float(out[robot_index, 1]))
    return total, robot_part, degen


def obstacle_force(pos: Vec2, radius: float, obstacles: ObstacleMap,
                   params: SfmParams, motion_dir: Vec2):
    """Repulsion from the nearest wall point only.

    A body exactly on a wall has no defined away-direction; the force is
    then applied along the normal of its last motion direction and the
    degenerate flag is set.
    """
    fx, fy, d, degen = kernels.obstacle_force(
        float(pos[0]), float(pos[1]), radius, obstacles.segments,
        params.obstacle_force_factor, params.obstacle_decay,
    )
    if not degen:
        return (fx, fy), 0
    mx, my = unit(motion_dir[0], motion_dir[1])
    if mx == 0.0 and my == 0.0:
        mx, my = 1.0, 0.0
    mag = params.obstacle_force_factor * math.exp((radius - d) / params.obstacle_decay)
    # left normal of the last motion direction
    return (-my * mag, mx * mag), 1


def group_force(pos: Vec2, vel: Vec2, heading: float, mates_pos,
                params: SfmParams) -> Vec2:
    """Walking-group force on one member given its mates' positions.

    * gaze: steers the heading toward the group centroid when the centroid
      sits outside the vision comfort cone;
    * cohesion: pulls toward the centroid once beyond a group-size-scaled
      threshold (soft tanh gate);
    * repulsion: pushes overlapping mates apart (grows hyperbolically
      toward contact, zero beyond the repulsion range).
    """
    mates = np.asarray(mates_pos, dtype=np.float64).reshape(-1, 2)
    if mates.shape[0] == 0:
        return (0.0, 0.0)

    n_members = mates.shape[0] + 1
    cx = (mates[:, 0].sum() + pos[0]) / n_members
    cy = (mates[:, 1].sum() + pos[1]) / n_members
    relx, rely = cx - pos[0], cy - pos[1]
    com_dist = math.hypot(relx, rely)

    gx = gy = 0.0
    if com_dist > _EPS:
        alpha = wrap_angle(math.atan2(rely, relx) - heading)
        excess = abs(alpha) - params.group_vision_angle
        if excess > 0.0:
            side = math.copysign(1.0, alpha)
            gx = params.group_gaze_factor * excess * (-math.sin(heading)) * side
            gy = params.group_gaze_factor * excess * (math.cos(heading)) * side

        threshold = (n_members - 1) / 2.0
        gate = (math.tanh(com_dist - threshold) + 1.0) / 2.0
        coh = params.group_cohesion_factor * gate
        gx += coh * relx / com_dist
        gy += coh * rely / com_dist

    rng = params.group_repulsion_range
    for j in range(mates.shape[0]):
        dx = pos[0] - mates[j, 0]
        dy = pos[1] - mates[j, 1]
        d = math.hypot(dx, dy)
        if _EPS < d < rng:
            push = params.group_repulsion_factor * (rng / d - 1.0)
            gx += push * dx / d
            gy += push * dy / d
    return (gx, gy)


def integrate(pos: Vec2, vel: Vec2, force: Vec2, dt: float, max_speed: float,
              heading: float | None = None):
    """Semi-implicit Euler step with a hard speed clamp.

    Velocity updates first, is clamped to ``max_speed``, and the clamped
    velocity moves the position.  The heading follows the velocity vector
    whenever the body is actually moving, otherwise the previous heading
    (or 0.0) is kept.
    """
    vx = vel[0] + force[0] * dt
    vy = vel[1] + force[1] * dt
    speed = math.hypot(vx, vy)
    if speed > max_speed:
        scale = max_speed / speed
        vx *= scale
        vy *= scale
        speed = max_speed
    px = pos[0] + vx * dt
    py = pos[1] + vy * dt
    if speed > 1e-6:
        new_heading = math.atan2(vy, vx)
    else:
        new_heading = heading if heading is not None else 0.0
    return (px, py), (vx, vy), new_heading


# re-exported for callers that only need the breakdown container
__all__ = [
    "SfmParams",
    "ForceBreakdown",
    "ObstacleMap",
    "desired_force",
    "social_force",
    "obstacle_force",
    "group_force",
    "integrate",
]
