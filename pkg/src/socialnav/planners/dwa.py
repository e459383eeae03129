"""Dynamic-window arc sampling shared by every local planner.

One evaluation pass samples a velocity window around the current command,
rolls every candidate forward as a constant-(v, w) arc, prunes arcs that
would touch a person or a wall, and scores the survivors:

    cost = 0.8 * (goal distance + 0.4 * goal alignment)
         + 0.3 * clearance deficit        (how far below 1 m the arc gets)
         + 0.3 * speed deficit            (how far below top speed)

plus one planner-specific criterion added on top.  Ties break toward the
straighter command, then the lower sample index, which keeps the choice
deterministic.  When every arc is pruned the planner falls back to the
least bad candidate: the one keeping the most room, pointed at the goal.

The base pipeline is shared by all planners so that a zero-valued extra
criterion reproduces the plain pipeline's choice exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..world import Observation, VelocityCommand


@dataclass(frozen=True)
class DwaConfig:
    v_samples: int = 10
    w_samples: int = 20
    horizon: float = 1.5
    sim_dt: float = 0.1
    goal_weight: float = 0.8
    align_weight: float = 0.4      # inside the goal term
    clearance_weight: float = 0.3
    clearance_ref: float = 1.0     # clearance above this is "enough"
    speed_weight: float = 0.3
    prune_margin: float = 0.12     # safety slack under the rollout resolution


@dataclass
class WindowEval:
    """Everything one sampling pass produces; planner criteria read this."""

    v: np.ndarray            # (S,) candidate linear speeds
    w: np.ndarray            # (S,) candidate angular speeds
    poses: np.ndarray        # (S, T+1, 3) arc poses (x, y, heading)
    clearance: np.ndarray    # (S,) smallest surface clearance along the arc
    pruned: np.ndarray       # (S,) bool, True = would collide
    base_cost: np.ndarray    # (S,) base criterion for survivors


def sample_window(obs: Observation, cfg: DwaConfig):
    """Reachable (v, w) grid for the next control period."""
    r = obs.robot
    dv = r.max_acc_v * obs.dt
    dw = r.max_acc_w * obs.dt
    v_lo = max(0.0, r.v - dv)
    v_hi = min(r.max_v, r.v + dv)
    w_lo = max(-r.max_w, r.w - dw)
    w_hi = min(r.max_w, r.w + dw)
    v = np.repeat(np.linspace(v_lo, v_hi, cfg.v_samples), cfg.w_samples)
    w = np.tile(np.linspace(w_lo, w_hi, cfg.w_samples), cfg.v_samples)
    return v, w


def rollout_arcs(obs: Observation, v, w, cfg: DwaConfig):
    """Constant-command arcs integrated at the rollout resolution."""
    steps = int(round(cfg.horizon / cfg.sim_dt))
    S = v.shape[0]
    poses = np.empty((S, steps + 1, 3))
    poses[:, 0, 0] = obs.robot.pos[0]
    poses[:, 0, 1] = obs.robot.pos[1]
    poses[:, 0, 2] = obs.robot.heading
    for t in range(steps):
        th = poses[:, t, 2]
        poses[:, t + 1, 0] = poses[:, t, 0] + v * np.cos(th) * cfg.sim_dt
        poses[:, t + 1, 1] = poses[:, t, 1] + v * np.sin(th) * cfg.sim_dt
        poses[:, t + 1, 2] = th + w * cfg.sim_dt
    return poses


def _clearances(obs: Observation, poses, cfg: DwaConfig):
    """(S,) smallest surface clearance along each arc (inf when empty).

    People are extrapolated at their current velocity over the horizon so
    oncoming walkers are met where they will be, not where they are.
    """
    S = poses.shape[0]
    T = poses.shape[1] - 1
    pts = poses[:, 1:, :2]                      # (S, T, 2)
    clear = np.full(S, np.inf)
    r_rad = obs.robot.radius
    tau = (np.arange(1, T + 1) * cfg.sim_dt)[None, :]
    for a in obs.agents:
        ax = a.pos[0] + a.vel[0] * tau
        ay = a.pos[1] + a.vel[1] * tau
        d = np.hypot(pts[:, :, 0] - ax, pts[:, :, 1] - ay)
        clear = np.minimum(clear, (d - a.radius - r_rad).min(axis=1))
    segs = obs.obstacles.segments
    for i in range(segs.shape[0]):
        ax, ay, bx, by = segs[i]
        abx, aby = bx - ax, by - ay
        L2 = abx * abx + aby * aby
        if L2 < 1e-18:
            d = np.hypot(pts[:, :, 0] - ax, pts[:, :, 1] - ay)
        else:
            t = ((pts[:, :, 0] - ax) * abx + (pts[:, :, 1] - ay) * aby) / L2
            t = np.clip(t, 0.0, 1.0)
            d = np.hypot(pts[:, :, 0] - (ax + t * abx),
                         pts[:, :, 1] - (ay + t * aby))
        clear = np.minimum(clear, (d - r_rad).min(axis=1))
    return clear


def evaluate_window(obs: Observation, cfg: DwaConfig) -> WindowEval:
    v, w = sample_window(obs, cfg)
    poses = rollout_arcs(obs, v, w, cfg)
    clear = _clearances(obs, poses, cfg)
    pruned = clear <= cfg.prune_margin

    gx, gy = obs.robot.goal
    end = poses[:, -1]
    d_end = np.hypot(end[:, 0] - gx, end[:, 1] - gy)
    bearing = np.arctan2(gy - end[:, 1], gx - end[:, 0])
    align = np.abs((end[:, 2] - bearing + np.pi) % (2.0 * np.pi) - np.pi)
    # alignment matters less the closer the arc ends to the goal
    goal_cost = d_end + cfg.align_weight * align * np.minimum(d_end, 1.0)

    capped = np.minimum(np.where(np.isinf(clear), cfg.clearance_ref, clear),
                        cfg.clearance_ref)
    clear_cost = 1.0 - capped / cfg.clearance_ref
    speed_cost = (obs.robot.max_v - v) / obs.robot.max_v

    base = (cfg.goal_weight * goal_cost
            + cfg.clearance_weight * clear_cost
            + cfg.speed_weight * speed_cost)
    return WindowEval(v=v, w=w, poses=poses, clearance=clear,
                      pruned=pruned, base_cost=base)


def recovery_command(ev: WindowEval, obs: Observation) -> VelocityCommand:
    """Least bad candidate when no arc is collision-free.

    Keep the most room first; among equals point at the goal, then stay
    straight.  A robot boxed in by walls ends up turning in place toward
    the goal, while one charged by a walker sidesteps instead of freezing.
    """
    gx, gy = obs.robot.goal
    end = ev.poses[:, -1]
    bearing = np.arctan2(gy - end[:, 1], gx - end[:, 0])
    err = np.abs((end[:, 2] - bearing + np.pi) % (2.0 * np.pi) - np.pi)
    best = None
    for idx in range(ev.v.shape[0]):
        key = (-ev.clearance[idx], err[idx], abs(ev.w[idx]), idx)
        if best is None or key < best:
            best = key
    idx = best[3]
    return VelocityCommand(float(ev.v[idx]), float(ev.w[idx]))


def pick_command(ev: WindowEval, obs: Observation,
                 cfg: DwaConfig, extra=None) -> VelocityCommand:
    """Lowest total cost wins; ties prefer straight, then sample order."""
    total = ev.base_cost if extra is None else ev.base_cost + extra
    best = None
    for idx in range(total.shape[0]):
        if ev.pruned[idx]:
            continue
        key = (total[idx], abs(ev.w[idx]), idx)
        if best is None or key < best:
            best = key
    if best is None:
        return recovery_command(ev, obs)
    idx = best[2]
    return VelocityCommand(float(ev.v[idx]), float(ev.w[idx]))


def plan_dwb(obs: Observation, cfg: DwaConfig | None = None) -> VelocityCommand:
    """Plain dynamic-window planner: goal, clearance, and speed terms."""
    cfg = cfg if cfg is not None else DwaConfig()
    ev = evaluate_window(obs, cfg)
    return pick_command(ev, obs, cfg)
