"""Dynamic-window planner with a predicted social-work criterion.

Identical to the plain pipeline plus one term: each candidate arc is
co-simulated with the pedestrians under the interaction force laws, and
the predicted inter-personal force exchange (robot-attributable force on
the people plus the people's force on the robot, horizon mean) is added
to the cost.  The term is computed by the compiled kernel when one is
available.  With nobody around it is identically zero and the choice
collapses to the plain planner's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..sfm import SfmParams
from ..world import Observation, VelocityCommand
from .dwa import DwaConfig, evaluate_window, pick_command


@dataclass(frozen=True)
class SfwConfig:
    dwa: DwaConfig = field(default_factory=DwaConfig)
    work_weight: float = 2.5
    sfm: SfmParams = field(default_factory=SfmParams)


def _kernel_params(p: SfmParams):
    return (p.desired_speed, p.max_speed, p.relaxation_time, p.lam,
            p.gamma, p.n, p.n_prime, p.social_force_factor,
            p.obstacle_force_factor, p.obstacle_decay, 0.3)


def plan_sfw(obs: Observation, cfg: SfwConfig | None = None) -> VelocityCommand:
    cfg = cfg if cfg is not None else SfwConfig()
    ev = evaluate_window(obs, cfg.dwa)
    if obs.agents:
        apos = np.asarray([a.pos for a in obs.agents])
        avel = np.asarray([a.vel for a in obs.agents])
        arad = np.asarray([a.radius for a in obs.agents])
        work = np.empty(ev.v.shape[0])
        kernels.social_work_rollouts(
            ev.poses, ev.v, apos, avel, arad, obs.obstacles.segments,
            _kernel_params(cfg.sfm), cfg.dwa.sim_dt, work)
        extra = cfg.work_weight * work
    else:
        extra = np.zeros(ev.base_cost.shape)
    return pick_command(ev, obs, cfg.dwa, extra=extra)
