"""Rebuild an episode's maps from its log.

Scans are not stored in the log. The world is regenerated from the header
config and every agent is re-scanned at its logged pose, which reproduces the
beliefs (and so the coverage figures) exactly because ray casting is
deterministic. Logged delivery events rebuild each agent's teammate views.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..comms import ViewEntry, initial_views, merged_view
from ..errors import LogParseError
from ..world import OccupancyGrid, build_world, raycast_scan, reachable_mask
from ..world.sensing import apply_scan
from .engine import EpisodeConfig


@dataclass
class DecisionSnapshot:
    """Everything an agent saw when decision ``index`` was made."""

    index: int
    step: int
    truth: OccupancyGrid
    beliefs: list                 # per agent, own belief (h, w) uint8
    merged: list                  # per agent, own belief joined with its views
    poses: list                   # per agent, (x, y, theta, v) at the decision
    views: list                   # per agent, {teammate: ViewEntry}
    goals: list
    actions: list


@dataclass
class ReplayResult:
    er_series: list
    final_er: float
    logged_final_er: float
    mismatches: list = field(default_factory=list)   # step k where replayed ER != logged ER

    @property
    def matches(self) -> bool:
        return not self.mismatches and self.final_er == self.logged_final_er


def _state(rec) -> tuple:
    return (float(rec[0]), float(rec[1]), float(rec[2]), float(rec[3]))


def replay(log, on_decision=None) -> ReplayResult:
    """Re-run sensing along the logged trajectory.

    ``on_decision(snapshot)`` is called once per decision record, after the
    message exchange and before the round's movement.
    """
    try:
        config = EpisodeConfig.from_dict(log.header["config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise LogParseError(f"log header has an unusable config: {exc}") from None
    sc = config.scenario
    truth = build_world(sc)
    n = config.n_agents
    steps = log.steps
    start = steps[0]["agents"]
    row, col = truth.cell_of(float(start[0][0]), float(start[0][1]))
    reach = reachable_mask(truth.cells, row, col).reshape(-1)
    n_reach = int(np.count_nonzero(reach))
    if n_reach != log.header.get("reachable_cells"):
        raise LogParseError("regenerated world does not match the logged reachable cell count")

    beliefs = [np.zeros(truth.shape, dtype=np.uint8) for _ in range(n)]
    team_known = np.zeros(truth.width * truth.height, dtype=bool)
    known_reach = 0

    def sense(i, rec):
        nonlocal known_reach
        scan = raycast_scan(truth, (float(rec[0]), float(rec[1]), float(rec[2])),
                            sc.lidar_range, sc.angular_resolution)
        apply_scan(beliefs[i], scan)
        obs = np.concatenate([scan.freed_cells, scan.obstacle_cells])
        fresh = obs[~team_known[obs]]
        team_known[fresh] = True
        known_reach += int(np.count_nonzero(reach[fresh]))

    er_series = []
    mismatches = []

    def advance(k):
        for i, rec in enumerate(steps[k]["agents"]):
            sense(i, rec)
        er = known_reach / n_reach
        er_series.append(er)
        if er != steps[k]["er"]:
            mismatches.append(k)

    advance(0)
    views = initial_views(beliefs, [_state(r)[:3] for r in start])
    for dec in log.decisions:
        s, e = int(dec["start_step"]), int(dec["end_step"])
        if s != len(er_series) - 1 or e >= len(steps) or e < s:
            raise LogParseError(f"decision {dec['index']} covers steps {s}..{e} out of sequence")
        poses = [_state(r) for r in steps[s]["agents"]]
        for receiver, sender, delivered in dec["deliveries"]:
            if delivered:
                views[receiver][sender] = ViewEntry(
                    beliefs[sender].copy(), poses[sender][:3], int(dec["index"]) + 1)
        if on_decision is not None:
            on_decision(DecisionSnapshot(
                index=int(dec["index"]),
                step=s,
                truth=truth,
                beliefs=[b.copy() for b in beliefs],
                merged=[merged_view(beliefs[i], views[i]) for i in range(n)],
                poses=poses,
                views=[dict(v) for v in views],
                goals=dec["goals"],
                actions=dec["actions"],
            ))
        for k in range(s + 1, e + 1):
            advance(k)
    if len(er_series) != len(steps):
        raise LogParseError("step records beyond the last decision")
    return ReplayResult(er_series, er_series[-1], float(log.final_er), mismatches)
