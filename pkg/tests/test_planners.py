"""Window sampling, arc scoring, and the three planner criteria."""

import math

import numpy as np
import pytest

from socialnav.planners import (
    PLANNERS,
    DwaConfig,
    SclConfig,
    SocialCostmap,
    get_planner,
    plan_dwb,
    plan_scl,
    plan_sfw,
)
from socialnav.planners.costmap import LETHAL, CostmapConfig
from socialnav.planners.dwa import evaluate_window, rollout_arcs, sample_window
from socialnav.sfm import ObstacleMap
from socialnav.world import AgentView, Observation, RobotView


def make_obs(robot_pos=(0.0, 0.0), heading=0.0, v=0.0, w=0.0,
             goal=(5.0, 0.0), agents=(), obstacles=None, dt=0.05):
    return Observation(
        t=0.0, dt=dt,
        robot=RobotView(pos=robot_pos, heading=heading, v=v, w=w, radius=0.3,
                        goal=goal, goal_radius=0.3, max_v=0.6, max_w=1.2,
                        max_acc_v=1.0, max_acc_w=2.5),
        agents=tuple(agents),
        obstacles=obstacles if obstacles is not None else ObstacleMap(),
    )


def agent(pos, vel=(0.0, 0.0), radius=0.3):
    return AgentView(pos=tuple(pos), vel=tuple(vel), radius=radius)


# -- sampling and rollouts -------------------------------------------------

def test_window_respects_acceleration_and_caps():
    obs = make_obs(v=0.5, w=1.1)
    v, w = sample_window(obs, DwaConfig())
    assert v.shape == (200,) and w.shape == (200,)
    assert v.min() >= 0.5 - 1.0 * 0.05 - 1e-12
    assert v.max() <= 0.6 + 1e-12          # capped at max_v, not v + dv
    assert w.max() <= 1.2 + 1e-12          # capped at max_w
    assert w.min() >= 1.1 - 2.5 * 0.05 - 1e-12


def test_window_from_rest_never_reverses():
    obs = make_obs(v=0.0)
    v, _ = sample_window(obs, DwaConfig())
    assert v.min() == 0.0
    assert v.max() == pytest.approx(0.05)


def test_straight_rollout_matches_closed_form():
    obs = make_obs(heading=0.3)
    cfg = DwaConfig()
    v = np.array([0.4])
    w = np.array([0.0])
    poses = rollout_arcs(obs, v, w, cfg)
    assert poses.shape == (1, 16, 3)
    end = poses[0, -1]
    assert end[0] == pytest.approx(0.4 * 1.5 * math.cos(0.3), abs=1e-12)
    assert end[1] == pytest.approx(0.4 * 1.5 * math.sin(0.3), abs=1e-12)
    assert end[2] == pytest.approx(0.3)


def test_pruning_blocks_arcs_into_a_wall():
    # place the wall so a full-speed straight arc ends just inside the prune
    # margin while the slowest arc in the window keeps clear of it
    cfg = DwaConfig()
    tip_fast = 0.6 * cfg.horizon
    wall_x = 0.3 + tip_fast + cfg.prune_margin - 0.02
    wall = ObstacleMap([((wall_x, -2.0), (wall_x, 2.0))])
    ev = evaluate_window(make_obs(v=0.6, obstacles=wall), cfg)
    straight = np.abs(ev.w) < 0.01
    fast = straight & (ev.v == ev.v.max())
    slow = straight & (ev.v == ev.v.min())
    assert fast.any() and slow.any()
    assert ev.pruned[fast].all()
    assert not ev.pruned[slow].any()


def test_boxed_in_window_is_fully_pruned():
    # at max speed 0.3 m short of a wall nothing in the window can avoid it
    wall = ObstacleMap([((0.6, -2.0), (0.6, 2.0))])
    ev = evaluate_window(make_obs(v=0.6, obstacles=wall), DwaConfig())
    assert ev.pruned.all()


def test_open_space_nothing_pruned():
    ev = evaluate_window(make_obs(v=0.3), DwaConfig())
    assert not ev.pruned.any()


# -- base planner behavior -------------------------------------------------

def test_dwb_drives_at_goal_ahead():
    cmd = plan_dwb(make_obs(v=0.3))
    assert cmd.v > 0.3                      # accelerates toward max
    assert abs(cmd.w) < 0.2


def test_dwb_turns_toward_side_goal():
    cmd = plan_dwb(make_obs(v=0.3, goal=(0.0, 5.0)))
    assert cmd.w > 0.0


def test_dwb_boxed_in_turns_in_place_toward_goal():
    # walls inside the robot's own radius: no arc (not even standing) is free,
    # so the fallback keeps the most room (stand still) and points at the goal
    box = ObstacleMap([
        ((0.29, -0.5), (0.29, 0.5)), ((-0.29, -0.5), (-0.29, 0.5)),
    ])
    cmd = plan_dwb(make_obs(v=0.0, goal=(0.0, 5.0), obstacles=box))
    assert cmd.v == 0.0
    assert cmd.w == pytest.approx(2.5 * 0.05)   # max reachable turn, left


def test_dwb_charged_head_on_sidesteps_not_freezes():
    # a walker dead ahead closing fast prunes the whole window; the fallback
    # must pick a candidate that moves aside rather than stopping in the lane
    walker = agent((1.1, 0.0), (-1.4, 0.0))
    cmd = plan_dwb(make_obs(v=0.6, goal=(5.0, 0.0), agents=[walker]))
    assert abs(cmd.w) > 0.0
    assert cmd.v > 0.0


def test_planner_is_deterministic():
    obs = make_obs(v=0.2, agents=[agent((2.0, 0.3), (-0.9, 0.0))])
    a = plan_dwb(obs)
    b = plan_dwb(obs)
    assert a == b


def test_registry_lookup_and_error():
    assert sorted(PLANNERS) == ["dwb", "scl", "sfw"]
    assert get_planner("dwb") is plan_dwb
    with pytest.raises(ValueError, match="unknown planner"):
        get_planner("teleport")


# -- social costmap layer --------------------------------------------------

def test_costmap_peak_sits_on_the_person():
    layer = SocialCostmap([agent((1.0, 1.0))])
    near = float(layer.cost_at(1.0, 1.0))
    far = float(layer.cost_at(4.0, 1.0))
    assert near == pytest.approx(180.0, rel=0.01)
    assert far < 0.01
    assert near <= LETHAL


def test_costmap_stretches_ahead_of_motion():
    layer = SocialCostmap([agent((0.0, 0.0), vel=(0.9, 0.0))])
    # cell-centered queries so snapping keeps the probes symmetric
    ahead = float(layer.cost_at(1.01, 0.0))
    behind = float(layer.cost_at(-1.01, 0.0))
    beside = float(layer.cost_at(0.0, 1.01))
    assert ahead > behind
    assert behind == pytest.approx(beside, rel=0.01)


def test_costmap_standing_person_is_isotropic():
    layer = SocialCostmap([agent((0.0, 0.0), vel=(0.0, 0.0))])
    a = float(layer.cost_at(0.81, 0.0))    # both snap to |x| = 0.825
    b = float(layer.cost_at(-0.81, 0.0))
    assert a == pytest.approx(b, rel=1e-9)


def test_costmap_lethal_obstacle_stamp():
    layer = SocialCostmap([], obstacle_segments=[(0.0, -1.0, 0.0, 1.0)],
                          obstacle_inflation=0.3)
    assert float(layer.cost_at(0.1, 0.0)) == LETHAL
    assert float(layer.cost_at(1.0, 0.0)) == 0.0


def test_costmap_snaps_to_grid():
    layer = SocialCostmap([agent((0.0, 0.0))], CostmapConfig(resolution=0.5))
    assert float(layer.cost_at(0.6, 0.0)) == float(layer.cost_at(0.9, 0.0))


# -- social criteria change choices ----------------------------------------

def test_scl_deviates_away_from_a_standing_person():
    # person ahead-left, far enough that the base planner sees no clearance
    # problem; only the costmap criterion prefers bending right
    obs = make_obs(v=0.4, agents=[agent((2.4, 0.3), vel=(0.0, 0.0))])
    base = plan_dwb(obs)
    social = plan_scl(obs)
    assert social != base
    assert social.w < base.w


def test_sfw_slows_and_swerves_for_an_oncoming_walker():
    obs = make_obs(v=0.4, agents=[agent((3.2, 0.0), vel=(-0.9, 0.0))])
    base = plan_dwb(obs)
    social = plan_sfw(obs)
    assert social != base
    assert abs(social.w) > abs(base.w)


def test_social_planners_match_dwb_with_nobody_around():
    rng = np.random.default_rng(7)
    for _ in range(25):
        obs = make_obs(
            robot_pos=tuple(rng.uniform(-3, 3, 2)),
            heading=float(rng.uniform(-math.pi, math.pi)),
            v=float(rng.uniform(0, 0.6)),
            w=float(rng.uniform(-1.2, 1.2)),
            goal=tuple(rng.uniform(-6, 6, 2)),
        )
        base = plan_dwb(obs)
        assert plan_scl(obs) == base
        assert plan_sfw(obs) == base


def test_zero_agents_equality_with_walls_present():
    walls = ObstacleMap([((2.0, -3.0), (2.0, 3.0))])
    obs = make_obs(v=0.5, goal=(1.5, 2.0), obstacles=walls)
    base = plan_dwb(obs)
    assert plan_scl(obs) == base
    assert plan_sfw(obs) == base
