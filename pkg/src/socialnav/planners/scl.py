"""Dynamic-window planner with a person-aware costmap criterion.

Identical to the plain pipeline plus one term built from the social
costmap cells along each arc: the time-averaged cell cost (normalized by
the lethal cost) plus the fraction of the horizon spent inside the
keep-out band.  Averaging over the arc rather than taking its worst cell
keeps the term discriminating even when the robot is already inside a
person's bubble: arcs that enter later or leave sooner always score
better, so the planner commits to a detour and holds it.  With nobody
around the layer is empty, the term is zero, and the choice collapses to
the plain planner's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..world import Observation, VelocityCommand
from .costmap import LETHAL, CostmapConfig, SocialCostmap
from .dwa import DwaConfig, evaluate_window, pick_command


@dataclass(frozen=True)
class SclConfig:
    dwa: DwaConfig = field(default_factory=DwaConfig)
    costmap: CostmapConfig = field(default_factory=CostmapConfig)
    weight: float = 2.0
    keepout_cost: float = 24.0   # cells at or above this act as a soft wall
    keepout_weight: float = 2.5


def plan_scl(obs: Observation, cfg: SclConfig | None = None) -> VelocityCommand:
    cfg = cfg if cfg is not None else SclConfig()
    ev = evaluate_window(obs, cfg.dwa)
    if obs.agents:
        layer = SocialCostmap(obs.agents, cfg.costmap)
        pts = ev.poses[:, 1:, :2]
        cells = layer.cost_at(pts[:, :, 0], pts[:, :, 1])
        extra = (cfg.weight * cells.mean(axis=1) / LETHAL
                 + cfg.keepout_weight
                 * (cells >= cfg.keepout_cost).mean(axis=1))
    else:
        extra = np.zeros(ev.base_cost.shape)
    return pick_command(ev, obs, cfg.dwa, extra=extra)
