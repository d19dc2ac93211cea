import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from teamexplore.errors import ConfigurationError, DomainError, LogParseError
from teamexplore.sim import (
    EpisodeConfig,
    EpisodeLog,
    RewardConfig,
    Status,
    check_termination,
    compute_step_rewards,
    replay,
    run_episode,
)
from teamexplore.vehicle import footprint_collides
from teamexplore.world import OBSTACLE, ScenarioConfig, build_world

SMALL = ScenarioConfig.for_kind(
    "random_obstacle", side_length=40.0, global_step_budget=4, local_steps_per_decision=10
)


@pytest.fixture(scope="module")
def small_log():
    return run_episode(EpisodeConfig(scenario=SMALL.with_seed(3), n_agents=2, seed=1))


# --- rewards ---------------------------------------------------------------------

def test_reward_hand_values():
    known = np.zeros(10, dtype=bool)
    r = compute_step_rewards(known, [[0, 1, 2], [2, 3]], [False, False], 0.5, False, RewardConfig())
    assert (r[0].explore, r[0].overlap, r[0].time, r[0].success, r[0].collision) == (3.0, -1.0, -0.5, 0.0, 0.0)
    assert (r[1].explore, r[1].overlap) == (2.0, -1.0)
    assert r[0].combined == pytest.approx(0.02 * 3 - 0.02 * 1 - 0.1 * 0.5, abs=1e-12)
    assert r[1].combined == pytest.approx(0.02 * 2 - 0.02 * 1 - 0.1 * 0.5, abs=1e-12)


def test_reward_success_collision_and_known_cells():
    known = np.zeros(6, dtype=bool)
    known[[0, 1]] = True
    r = compute_step_rewards(known, [[0, 1, 4], []], [True, False], 0.9, True, RewardConfig())
    assert r[0].explore == 1.0 and r[0].overlap == 0.0
    assert r[0].success == 10.0 and r[0].collision == -1.0
    assert r[0].combined == pytest.approx(10.0 + 0.02 - 1.0 - 0.09, abs=1e-12)
    assert r[1].explore == 0.0 and r[1].collision == 0.0


def test_reward_input_errors():
    with pytest.raises(DomainError):
        compute_step_rewards(np.zeros(4, bool), [[7]], [False], 0.0, False, RewardConfig())
    with pytest.raises(DomainError):
        compute_step_rewards(np.zeros(4, bool), [[1]], [False, True], 0.0, False, RewardConfig())
    with pytest.raises(ConfigurationError):
        RewardConfig(weights=(1.0, 2.0))
    with pytest.raises(ConfigurationError):
        RewardConfig(R_s=-1.0)


@given(
    obs=st.lists(st.sets(st.integers(0, 49), max_size=20), min_size=1, max_size=5),
    known=st.sets(st.integers(0, 49)),
)
def test_reward_explore_and_overlap_bounds(obs, known):
    mask = np.zeros(50, dtype=bool)
    mask[list(known)] = True
    r = compute_step_rewards(mask, [sorted(o) for o in obs], [False] * len(obs), 0.0, False, RewardConfig())
    for o, ri in zip(obs, r):
        assert 0 <= ri.explore <= len(o)
        assert -len(o) <= ri.overlap <= 0
        assert ri.explore == len(o - known)


# --- termination -------------------------------------------------------------------

def test_check_termination_cases():
    sc = ScenarioConfig(global_step_budget=30)
    assert check_termination(0.95, 3, sc) is Status.SUCCESS
    assert check_termination(0.949, 3, sc) is Status.CONTINUE
    assert check_termination(0.5, 30, sc) is Status.TIMEOUT
    # success wins when both hold
    assert check_termination(1.0, 30, sc) is Status.SUCCESS


def test_zero_budget_times_out_at_initial_state():
    sc = SMALL.with_seed(3)
    from dataclasses import replace
    log = run_episode(EpisodeConfig(scenario=replace(sc, global_step_budget=0), n_agents=2, seed=1))
    assert log.summary["status"] == "Timeout"
    assert len(log.steps) == 1 and log.decisions == []
    assert log.final_er == log.summary["initial_er"] == log.steps[0]["er"]


def test_fully_visible_world_succeeds_immediately():
    sc = ScenarioConfig.for_kind("random_obstacle", side_length=10.0, density=0.0, lidar_range=20.0)
    log = run_episode(EpisodeConfig(scenario=sc, n_agents=2, seed=1))
    assert log.summary["status"] == "Success"
    assert log.final_er == 1.0 and log.summary["movement_steps"] == 0


def test_episode_config_validation():
    with pytest.raises(ConfigurationError):
        EpisodeConfig(n_agents=0)
    with pytest.raises(ConfigurationError):
        EpisodeConfig(planner="nope")
    cfg = EpisodeConfig(scenario=SMALL)
    assert cfg.dwa.dt == SMALL.dt
    assert EpisodeConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


# --- episode invariants ----------------------------------------------------------

def test_episode_is_deterministic(small_log):
    again = run_episode(EpisodeConfig(scenario=SMALL.with_seed(3), n_agents=2, seed=1))
    assert again.to_jsonl() == small_log.to_jsonl()


def test_er_is_monotone_and_bounded(small_log):
    er = small_log.er_series
    assert all(b >= a for a, b in zip(er, er[1:]))
    assert 0.0 < er[0] and er[-1] <= 1.0
    assert small_log.final_er == er[-1]


def test_agents_never_overlap_obstacles(small_log):
    truth = build_world(SMALL.with_seed(3))
    obst = truth.cells == OBSTACLE
    r = EpisodeConfig().vehicle.footprint_radius
    for step in small_log.steps:
        for x, y, *_ in step["agents"]:
            assert not footprint_collides(obst, truth.resolution, x, y, r)


def test_log_structure(small_log):
    s = small_log.summary
    assert s["decisions"] == len(small_log.decisions) == 4
    assert s["movement_steps"] == len(small_log.steps) - 1
    for dec in small_log.decisions:
        assert dec["end_step"] - dec["start_step"] <= SMALL.local_steps_per_decision
        assert len(dec["rewards"]) == len(dec["goals"]) == 2
        # full topology, two agents: two directed messages per round
        assert len(dec["deliveries"]) == 2


@settings(max_examples=5)
@given(seed=st.integers(0, 1000), planner=st.sampled_from(["rrt", "mmpf", "voronoi"]))
def test_replay_reproduces_every_er_value(seed, planner):
    from dataclasses import replace
    sc = replace(SMALL.with_seed(seed), global_step_budget=2)
    log = run_episode(EpisodeConfig(scenario=sc, n_agents=2, seed=seed, planner=planner))
    result = replay(log)
    assert result.matches and result.er_series == log.er_series


# --- log serialisation -----------------------------------------------------------

def test_log_round_trip(small_log, tmp_path):
    path = tmp_path / "ep.jsonl"
    small_log.save(path)
    back = EpisodeLog.load(path)
    assert back.to_jsonl() == small_log.to_jsonl()
    assert back.header == small_log.header and back.summary == small_log.summary


def test_log_records_are_ordered(small_log):
    kinds = [json.loads(line)["type"] for line in small_log.to_jsonl().splitlines()]
    assert kinds[0] == "header" and kinds[-1] == "summary"
    assert kinds.count("header") == 1 and kinds.count("summary") == 1


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda lines: lines[:-1], "incomplete"),
        (lambda lines: lines[1:], "before header"),
        (lambda lines: lines[:1] + lines, "duplicate header"),
        (lambda lines: lines + ['{"type": "bogus"}'], "unknown record type"),
        (lambda lines: lines + ["{not json"], "line"),
        (lambda lines: [], "empty"),
    ],
)
def test_log_parse_errors(small_log, mutate, message):
    lines = small_log.to_jsonl().splitlines()
    with pytest.raises(LogParseError, match=message):
        EpisodeLog.from_jsonl("\n".join(mutate(lines)))


def test_log_schema_and_order_checks(small_log):
    lines = small_log.to_jsonl().splitlines()
    header = json.loads(lines[0])
    header["schema_version"] = 99
    with pytest.raises(LogParseError, match="schema"):
        EpisodeLog.from_jsonl("\n".join([json.dumps(header)] + lines[1:]))
    steps = [i for i, line in enumerate(lines) if '"type":"step"' in line]
    swapped = list(lines)
    swapped[steps[1]], swapped[steps[2]] = swapped[steps[2]], swapped[steps[1]]
    with pytest.raises(LogParseError, match="out of order"):
        EpisodeLog.from_jsonl("\n".join(swapped))
