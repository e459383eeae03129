"""Local planner registry.

Three dynamic-window planners share one sampling/pruning/scoring
pipeline and differ only in the extra criterion added on top:

* ``dwb`` — none (goal, clearance, and speed terms only);
* ``scl`` — worst person-costmap cell an arc passes through;
* ``sfw`` — predicted social-force exchange along the arc.

``get_planner(name)`` returns a callable ``planner(observation, config)``
returning a :class:`~socialnav.world.VelocityCommand`; pass ``None`` as
the config for the planner's defaults.
"""

from __future__ import annotations

from .costmap import CostmapConfig, SocialCostmap
from .dwa import DwaConfig, plan_dwb
from .scl import SclConfig, plan_scl
from .sfw import SfwConfig, plan_sfw

PLANNERS = {
    "dwb": plan_dwb,
    "scl": plan_scl,
    "sfw": plan_sfw,
}

DEFAULT_CONFIGS = {
    "dwb": DwaConfig,
    "scl": SclConfig,
    "sfw": SfwConfig,
}

__all__ = [
    "CostmapConfig", "DwaConfig", "SclConfig", "SfwConfig",
    "SocialCostmap", "PLANNERS", "DEFAULT_CONFIGS", "get_planner",
    "plan_dwb", "plan_scl", "plan_sfw",
]


def get_planner(name: str):
    try:
        return PLANNERS[name]
    except KeyError:
        raise ValueError(
            f"unknown planner {name!r}; known: {sorted(PLANNERS)}") from None
