"""Episode engine: scan, exchange, plan, drive, reward, repeat."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..comms import CommsConfig, exchange, initial_views, merged_view
from ..errors import ConfigurationError, ExplorationComplete, ScenarioError
from ..planners import PlannerContext, PatchGrid, make_planner, planner_config, quantize_goal
from ..vehicle import AgentState, DwaConfig, VehicleParams, dwa_select_mask, footprint_collides, step_kinematics
from ..world import FREE, OBSTACLE, OccupancyGrid, ScenarioConfig, build_world, raycast_scan, reachable_mask
from ..world.sensing import apply_scan
from .log import SCHEMA_VERSION, EpisodeLog
from .navigation import Navigator
from .rewards import RewardConfig, compute_step_rewards


class Status(str, Enum):
    CONTINUE = "Continue"
    SUCCESS = "Success"
    TIMEOUT = "Timeout"


def check_termination(er: float, decision_index: int, cfg: ScenarioConfig) -> Status:
    if er >= cfg.completion_threshold:
        return Status.SUCCESS
    if decision_index >= cfg.global_step_budget:
        return Status.TIMEOUT
    return Status.CONTINUE


def stream(seed: int, label: str, *extra: int) -> np.random.Generator:
    """Independent generator for one purpose (spawn, planner, comms) of one episode."""
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode("ascii")), *[int(e) for e in extra]]
    return np.random.default_rng(np.random.SeedSequence(words))


@dataclass(frozen=True)
class EpisodeConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    planner: str = "voronoi"
    planner_params: dict = field(default_factory=dict)
    comms: CommsConfig = field(default_factory=CommsConfig)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    dwa: DwaConfig | None = None
    reward: RewardConfig = field(default_factory=RewardConfig)
    n_agents: int = 3
    seed: int = 0
    lookahead: float = 4.0

    def __post_init__(self):
        if self.n_agents < 1:
            raise ConfigurationError("n_agents must be >= 1")
        planner_config(self.planner, **self.planner_params)
        if self.dwa is None:
            object.__setattr__(self, "dwa", DwaConfig(dt=self.scenario.dt))

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "planner": self.planner,
            "planner_params": dict(self.planner_params),
            "comms": self.comms.to_dict(),
            "vehicle": self.vehicle.to_dict(),
            "dwa": self.dwa.to_dict(),
            "reward": self.reward.to_dict(),
            "n_agents": self.n_agents,
            "seed": self.seed,
            "lookahead": self.lookahead,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EpisodeConfig":
        return cls(
            scenario=ScenarioConfig.from_dict(d["scenario"]),
            planner=d["planner"],
            planner_params=dict(d.get("planner_params", {})),
            comms=CommsConfig(**d["comms"]),
            vehicle=VehicleParams(**d["vehicle"]),
            dwa=DwaConfig(**d["dwa"]),
            reward=RewardConfig(**d["reward"]),
            n_agents=int(d["n_agents"]),
            seed=int(d["seed"]),
            lookahead=float(d.get("lookahead", 4.0)),
        )


def sample_spawns(truth: OccupancyGrid, n: int, scenario: ScenarioConfig, params: VehicleParams,
                  rng: np.random.Generator, attempts: int = 200) -> list[AgentState]:
    """Spawn poses at free cell centers, clear of obstacles and 4 footprint radii apart."""
    res = truth.resolution
    obstacles = truth.cells == OBSTACLE
    free = np.flatnonzero(truth.flat == FREE)
    centers = np.column_stack([(free % truth.width + 0.5) * res, (free // truth.width + 0.5) * res])
    clear = np.array([not footprint_collides(obstacles, res, x, y, params.footprint_radius) for x, y in centers])
    free, centers = free[clear], centers[clear]
    if free.size == 0:
        raise ScenarioError("no free cell can hold a vehicle")
    min_sep = 4.0 * params.footprint_radius
    for _ in range(attempts):
        anchor = centers[int(rng.integers(free.size))]
        if scenario.spawn_radius > 0:
            near = np.flatnonzero(((centers - anchor) ** 2).sum(axis=1) <= scenario.spawn_radius ** 2)
        else:
            near = np.arange(free.size)
        reach = reachable_mask(truth.cells, int(free[near[0]] // truth.width), int(free[near[0]] % truth.width))
        near = near[reach.flat[free[near]]]
        order = rng.permutation(near)
        chosen = []
        for idx in order:
            p = centers[idx]
            if all(((p - centers[c]) ** 2).sum() >= min_sep ** 2 for c in chosen):
                chosen.append(idx)
                if len(chosen) == n:
                    break
        if len(chosen) == n:
            headings = rng.uniform(-math.pi, math.pi, size=n)
            return [AgentState(float(centers[c, 0]), float(centers[c, 1]), float(h), 0.0)
                    for c, h in zip(chosen, headings)]
    raise ScenarioError(f"could not place {n} agents after {attempts} attempts")


def _agent_record(state: AgentState, a: float, phi: float, collided: bool) -> list:
    return [state.x, state.y, state.theta, state.v, a, phi, bool(collided)]


def run_episode(config: EpisodeConfig) -> EpisodeLog:
    """Simulate one seeded episode and return its complete trace."""
    sc = config.scenario
    truth = build_world(sc)
    res = truth.resolution
    truth_obstacles = truth.cells == OBSTACLE
    n = config.n_agents
    params = config.vehicle
    dwa = config.dwa
    planner = make_planner(config.planner, planner_config(config.planner, **config.planner_params))
    patch_grid = PatchGrid.for_map(truth.side_x, truth.side_y)

    spawn_rng = stream(config.seed, "spawn")
    planner_rng = stream(config.seed, "planner")
    comms_rng = stream(config.seed, "comms", config.comms.seed)

    states = sample_spawns(truth, n, sc, params, spawn_rng)
    spawn_row, spawn_col = truth.cell_of(states[0].x, states[0].y)
    reach = reachable_mask(truth.cells, spawn_row, spawn_col).reshape(-1)
    n_reach = int(np.count_nonzero(reach))
    beliefs = [np.zeros(truth.shape, dtype=np.uint8) for _ in range(n)]
    team_known = np.zeros(truth.width * truth.height, dtype=bool)
    known_reach = 0

    def sense(i):
        nonlocal known_reach
        scan = raycast_scan(truth, states[i].pose, sc.lidar_range, sc.angular_resolution)
        apply_scan(beliefs[i], scan)
        obs = np.concatenate([scan.freed_cells, scan.obstacle_cells])
        fresh = obs[~team_known[obs]]
        team_known[fresh] = True
        known_reach += int(np.count_nonzero(reach[fresh]))
        return obs

    log = EpisodeLog(header={
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "grid": {"width": truth.width, "height": truth.height, "resolution": res},
        "reachable_cells": n_reach,
    })

    for i in range(n):
        sense(i)
    er = known_reach / n_reach
    initial_er = er
    log.steps.append({"k": 0, "decision": -1, "er": er,
                      "agents": [_agent_record(s, 0.0, 0.0, False) for s in states]})

    views = initial_views(beliefs, [s.pose for s in states])
    navigators = [Navigator(res, config.lookahead) for _ in range(n)]
    k = 0
    decision = 0
    status = check_termination(er, decision, sc)
    while status is Status.CONTINUE:
        start_step = k
        prev_known = team_known.copy()
        poses = [s.pose for s in states]
        views, deliveries = exchange(beliefs, poses, views, config.comms, decision + 1, comms_rng)

        goals, actions = [], []
        for i in range(n):
            merged = merged_view(beliefs[i], views[i])
            ctx = PlannerContext(
                agent_id=i,
                own_belief=OccupancyGrid(truth.width, truth.height, res, beliefs[i]),
                merged_belief=OccupancyGrid(truth.width, truth.height, res, merged),
                self_pose=states[i].pose,
                teammate_poses={j: e.pose[:2] for j, e in views[i].items()},
                rng=planner_rng,
            )
            try:
                raw = planner(ctx)
            except ExplorationComplete:
                raw = None
            if raw is None:
                goals.append(None)
                actions.append(None)
                navigators[i].goal = None
                continue
            action, goal = quantize_goal(raw, patch_grid)
            goals.append(list(goal))
            actions.append(action.to_list())
            navigators[i].plan(merged, (states[i].x, states[i].y), goal)

        observed = [[] for _ in range(n)]
        collided_round = [False] * n
        for _ in range(sc.local_steps_per_decision):
            controls = []
            for i in range(n):
                nav = navigators[i]
                if nav.goal is None:
                    target = (states[i].x, states[i].y)
                else:
                    if nav.blocked(beliefs[i]):
                        nav.plan(beliefs[i], (states[i].x, states[i].y), nav.goal)
                    target = nav.carrot((states[i].x, states[i].y))
                controls.append(dwa_select_mask(beliefs[i] == OBSTACLE, res, states[i], target, dwa, params))
            records = []
            for i in range(n):
                u = controls[i]
                nxt = step_kinematics(states[i], u, sc.dt, params)
                hit = footprint_collides(truth_obstacles, res, nxt.x, nxt.y, params.footprint_radius)
                if hit:
                    nxt = AgentState(states[i].x, states[i].y, states[i].theta, 0.0)
                    collided_round[i] = True
                states[i] = nxt
                records.append(_agent_record(nxt, u.a, u.phi, hit))
            for i in range(n):
                observed[i].append(sense(i))
            k += 1
            er = known_reach / n_reach
            log.steps.append({"k": k, "decision": decision, "er": er, "agents": records})
            if er >= sc.completion_threshold:
                break

        decision += 1
        success_now = er >= sc.completion_threshold
        rewards = compute_step_rewards(
            prev_known,
            [np.concatenate(o) if o else np.zeros(0, dtype=np.int64) for o in observed],
            collided_round, er, success_now, config.reward,
        )
        log.decisions.append({
            "index": decision - 1,
            "start_step": start_step,
            "end_step": k,
            "goals": goals,
            "actions": actions,
            "deliveries": [[r, s, d] for r, s, d in deliveries],
            "rewards": [r.to_dict() for r in rewards],
            "er": er,
        })
        status = check_termination(er, decision, sc)

    log.summary = {
        "status": status.value,
        "final_er": er,
        "initial_er": initial_er,
        "movement_steps": k,
        "decisions": decision,
    }
    return log
