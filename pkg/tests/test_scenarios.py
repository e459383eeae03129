"""Scenario schema, validation messages, built-in rooms, spawn jitter."""

import math

import pytest

from socialnav.scenarios import (
    ScenarioConfig,
    ScenarioError,
    _jittered_starts,
    build_world,
    builtin_scenarios,
    config_from_dict,
    config_to_dict,
    load_scenario,
    make_combined,
    make_crossing,
    make_passing,
    resolve_scenario,
    save_scenario,
    validate_config,
)


def minimal(**overrides):
    data = {
        "name": "t",
        "world": {"bounds": [0.0, -3.0, 10.0, 3.0]},
        "robot": {"init_pose": [0.5, 0.0, 0.0], "goal": [9.0, 0.0]},
        "agents": [
            {"behavior": "regular", "init_pose": [5.0, 1.0, 0.0],
             "goals": [[5.0, -2.0]]},
        ],
    }
    data.update(overrides)
    return data


# -- dict <-> config <-> file round trips ----------------------------------

def test_yaml_round_trip_is_identity(tmp_path):
    cfg = make_combined()
    path = tmp_path / "combined.yaml"
    save_scenario(cfg, path)
    loaded = load_scenario(path)
    assert config_to_dict(loaded) == config_to_dict(cfg)


def test_defaults_fill_omitted_sections():
    cfg = validate_config(config_from_dict(minimal()))
    assert cfg.sim.dt == 0.05
    assert cfg.sim.max_time == 120.0
    assert cfg.robot.planner == "dwb"
    assert cfg.robot.limits.max_v == 0.6
    assert cfg.agents[0].desired_speed == 0.9
    assert cfg.agents[0].cyclic is True
    assert cfg.jitter.pos == 0.0
    assert cfg.metrics == "all"


def test_agent_ids_default_to_position():
    cfg = config_from_dict(minimal(agents=[
        {"behavior": "regular", "init_pose": [4.0, 1.0, 0.0], "goals": [[1.0, 1.0]]},
        {"behavior": "scared", "init_pose": [7.0, -1.0, 0.0], "goals": [[1.0, 0.0]]},
    ]))
    assert [a.id for a in cfg.agents] == [0, 1]


# -- validation messages name the offending key ----------------------------

def test_behavior_typo_names_key_and_lists_valid_values():
    data = minimal()
    data["agents"][0]["behavior"] = "currious"
    with pytest.raises(ScenarioError) as err:
        validate_config(config_from_dict(data))
    msg = str(err.value)
    assert "agents[0].behavior" in msg and "currious" in msg
    for name in ("regular", "impassive", "surprised", "scared", "curious",
                 "threatening"):
        assert name in msg


def test_unknown_planner_lists_registry():
    data = minimal(robot={"planner": "teleport", "init_pose": [0.5, 0.0, 0.0],
                          "goal": [9.0, 0.0]})
    with pytest.raises(ScenarioError, match="robot.planner.*teleport"):
        validate_config(config_from_dict(data))


def test_unknown_root_key_rejected():
    with pytest.raises(ScenarioError, match="scenario root.*unknown key 'physics'"):
        config_from_dict(minimal(physics={}))


def test_unknown_agent_key_rejected():
    data = minimal()
    data["agents"][0]["color"] = "red"
    with pytest.raises(ScenarioError, match=r"agents\[0\].*unknown key 'color'"):
        config_from_dict(data)


def test_unknown_sfm_override_rejected():
    data = minimal()
    data["agents"][0]["sfm"] = {"forse_factor": 2.0}
    with pytest.raises(ScenarioError, match=r"agents\[0\].sfm.*forse_factor"):
        validate_config(config_from_dict(data))


def test_agent_without_goals_rejected():
    data = minimal()
    data["agents"][0]["goals"] = []
    with pytest.raises(ScenarioError, match=r"agents\[0\].goals"):
        validate_config(config_from_dict(data))


def test_speed_ordering_enforced():
    data = minimal()
    data["agents"][0]["desired_speed"] = 2.0
    data["agents"][0]["max_speed"] = 1.0
    with pytest.raises(ScenarioError, match="desired_speed <= max_speed"):
        validate_config(config_from_dict(data))


def test_overlapping_starts_rejected():
    data = minimal(agents=[
        {"behavior": "regular", "init_pose": [5.0, 1.0, 0.0], "goals": [[1.0, 0.0]]},
        {"behavior": "regular", "init_pose": [5.2, 1.0, 0.0], "goals": [[1.0, 1.0]]},
    ])
    with pytest.raises(ScenarioError, match=r"agents\[1\].init_pose.*overlaps"):
        validate_config(config_from_dict(data))


def test_duplicate_agent_ids_rejected():
    data = minimal(agents=[
        {"id": 3, "behavior": "regular", "init_pose": [5.0, 1.0, 0.0],
         "goals": [[1.0, 0.0]]},
        {"id": 3, "behavior": "regular", "init_pose": [7.0, -1.0, 0.0],
         "goals": [[1.0, 1.0]]},
    ])
    with pytest.raises(ScenarioError, match=r"agents\[1\].id.*duplicate"):
        validate_config(config_from_dict(data))


def test_position_outside_bounds_rejected():
    data = minimal(robot={"init_pose": [-2.0, 0.0, 0.0], "goal": [9.0, 0.0]})
    with pytest.raises(ScenarioError, match="robot.init_pose.*outside bounds"):
        validate_config(config_from_dict(data))


def test_unknown_metric_selection_rejected():
    with pytest.raises(ScenarioError, match="metrics.*path_lenght"):
        validate_config(config_from_dict(minimal(metrics=["path_lenght"])))


def test_bad_yaml_and_empty_file(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("robot: [unclosed", encoding="utf-8")
    with pytest.raises(ScenarioError, match="not valid YAML"):
        load_scenario(bad)
    empty = tmp_path / "empty.yaml"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ScenarioError, match="empty scenario"):
        load_scenario(empty)


# -- built-in rooms --------------------------------------------------------

def test_builtin_names_and_freshness():
    rooms = builtin_scenarios()
    assert sorted(rooms) == ["combined", "crossing", "passing"]
    rooms["passing"].robot.goal = [0.0, 0.0]
    assert make_passing().robot.goal == [15.6, 0.0]


def test_passing_direct_path_length():
    cfg = make_passing()
    (x0, y0, _), (gx, gy) = cfg.robot.init_pose, cfg.robot.goal
    assert math.hypot(gx - x0, gy - y0) == pytest.approx(15.2, abs=1e-9)
    assert len(cfg.agents) == 2
    assert all(a.behavior == "regular" for a in cfg.agents)
    # both walkers head opposite to the robot
    assert all(a.goals[0][0] < a.init_pose[0] for a in cfg.agents)


def test_crossing_direct_path_length():
    cfg = make_crossing()
    (x0, y0, _), (gx, gy) = cfg.robot.init_pose, cfg.robot.goal
    assert math.hypot(gx - x0, gy - y0) == pytest.approx(4.9, abs=1e-9)
    assert len(cfg.agents) == 4
    # two perpendicular crossers, two diagonal
    perpendicular = sum(1 for a in cfg.agents if a.goals[0][0] == a.init_pose[0])
    assert perpendicular == 2


def test_combined_mixes_three_behaviors_at_distance():
    cfg = make_combined()
    assert len(cfg.agents) == 3
    assert sorted(a.behavior for a in cfg.agents) == [
        "curious", "regular", "threatening"]
    rx, ry, _ = cfg.robot.init_pose
    for a in cfg.agents:
        assert math.hypot(a.init_pose[0] - rx, a.init_pose[1] - ry) >= 8.0
        # goal line crosses the robot's corridor (sign change in y)
        assert a.init_pose[1] * a.goals[0][1] < 0


def test_builtins_validate_cleanly():
    for cfg in builtin_scenarios().values():
        validate_config(cfg)


def test_resolve_scenario_accepts_name_path_and_config(tmp_path):
    assert resolve_scenario("crossing").name == "crossing"
    path = tmp_path / "room.yaml"
    save_scenario(make_passing(), path)
    assert resolve_scenario(str(path)).name == "passing"
    cfg = make_combined()
    assert resolve_scenario(cfg) is cfg
    with pytest.raises(ScenarioError, match="neither a built-in name"):
        resolve_scenario("atrium")


# -- spawn jitter ----------------------------------------------------------

def test_jitter_is_deterministic_per_seed():
    cfg = make_passing()
    a = _jittered_starts(cfg, 7)
    b = _jittered_starts(cfg, 7)
    c = _jittered_starts(cfg, 8)
    assert a == b
    assert a != c


def test_zero_jitter_keeps_declared_starts():
    cfg = validate_config(config_from_dict(minimal()))
    starts, speeds = _jittered_starts(cfg, 123)
    assert starts == [(5.0, 1.0)]
    assert speeds == [0.9]


def test_jitter_never_produces_overlaps():
    data = minimal(agents=[
        {"behavior": "regular", "init_pose": [5.0, 1.0, 0.0], "goals": [[1.0, 0.0]]},
        {"behavior": "regular", "init_pose": [5.0, 1.7, 0.0], "goals": [[1.0, 1.0]]},
        {"behavior": "regular", "init_pose": [5.0, -1.7, 0.0], "goals": [[1.0, -1.0]]},
    ], jitter={"pos": 0.4, "speed": 0.2})
    cfg = validate_config(config_from_dict(data))
    for seed in range(40):
        starts, speeds = _jittered_starts(cfg, seed)
        bodies = [((0.5, 0.0), 0.3)] + [(s, 0.3) for s in starts]
        for i in range(len(bodies)):
            for j in range(i + 1, len(bodies)):
                (p, rp), (q, rq) = bodies[i], bodies[j]
                assert math.dist(p, q) >= rp + rq
        assert all(s >= 0.1 for s in speeds)


# -- world construction ----------------------------------------------------

def test_build_world_planner_and_seed_overrides():
    cfg = make_passing()
    w = build_world(cfg, planner="sfw", seed=42)
    assert w.trace.planner == "sfw"
    assert w.seed == 42
    w2 = build_world(cfg)
    assert w2.trace.planner == cfg.robot.planner
    assert w2.seed == cfg.sim.seed
    assert w2.trace.scenario == "passing"


def test_build_world_boundary_walls_present():
    w = build_world(make_passing())
    assert w.obstacles.segments.shape[0] == 4


def test_build_world_applies_planner_params():
    data = minimal(robot={"planner": "dwb", "planner_params": {"horizon": 2.0},
                          "init_pose": [0.5, 0.0, 0.0], "goal": [9.0, 0.0]})
    w = build_world(validate_config(config_from_dict(data)))
    assert w.planner_cfg.horizon == 2.0


def test_sfm_overrides_reach_the_agent():
    data = minimal()
    data["agents"][0]["sfm"] = {"relaxation_time": 0.8}
    data["agents"][0]["desired_speed"] = 1.1
    w = build_world(validate_config(config_from_dict(data)))
    assert w.agents[0].sfm.relaxation_time == 0.8
    assert w.agents[0].sfm.desired_speed == 1.1
