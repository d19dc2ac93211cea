"""Multi-agent RRT frontier planner."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigurationError, ExplorationComplete
from ..gridsearch import segment_clear
from ..world.analysis import frontier_mask
from ..world.grid import UNKNOWN
from ..world.sensing import CORNER_EPS
from .common import PlannerContext, cell_centers, info_gain_many, utility


@dataclass(frozen=True)
class RrtConfig:
    step_length: float = 5.0
    max_iterations: int = 300
    ig_radius: float = 10.0
    persist_tree: bool = False

    def __post_init__(self):
        if not self.step_length > 0 or not self.ig_radius > 0:
            raise ConfigurationError("RRT step_length and ig_radius must be positive")
        if self.max_iterations < 0:
            raise ConfigurationError("RRT max_iterations must be >= 0")

    def to_dict(self):
        return asdict(self)


def grow_tree(ctx: PlannerContext, cfg: RrtConfig, nodes=None):
    """Grow a random tree from the agent's position over the merged belief.

    Returns ``(nodes, edges, targets)``: tree node coordinates, (parent, child)
    index pairs and the extension points that landed in unknown space, in
    insertion order.
    """
    belief = ctx.merged_belief
    cells = belief.cells
    res = float(belief.resolution)
    side = np.array([belief.side_x, belief.side_y])
    root = np.array([float(ctx.self_pose[0]), float(ctx.self_pose[1])])
    if nodes is None or len(nodes) == 0:
        nodes = [root]
    else:
        nodes = [np.asarray(n, dtype=float) for n in nodes] + [root]
    edges = []
    targets = []
    arr = np.array(nodes)
    count = len(nodes)
    for _ in range(cfg.max_iterations):
        p = ctx.rng.uniform(0.0, 1.0, size=2) * side
        d2 = ((arr[:count] - p) ** 2).sum(axis=1)
        s_idx = int(np.argmin(d2))
        s = arr[s_idx]
        dist = float(np.sqrt(d2[s_idx]))
        if dist == 0.0:
            continue
        t = p if dist <= cfg.step_length else s + (p - s) * (cfg.step_length / dist)
        if not belief.contains(float(t[0]), float(t[1])):
            continue
        if not segment_clear(cells, res, float(s[0]), float(s[1]), float(t[0]), float(t[1]), CORNER_EPS):
            continue
        if belief.flat[belief.index_of(float(t[0]), float(t[1]))] == UNKNOWN:
            targets.append(t)
            continue
        if count == arr.shape[0]:
            arr = np.concatenate([arr, np.empty_like(arr)])
        arr[count] = t
        edges.append((s_idx, count))
        count += 1
    return arr[:count], edges, np.array(targets).reshape(-1, 2)


def select_target(ctx: PlannerContext, targets: np.ndarray, ig_radius: float) -> int:
    """Index of the target with the highest normalised utility (first on ties)."""
    ig = info_gain_many(ctx.merged_belief, targets, ig_radius)
    pos = np.array([float(ctx.self_pose[0]), float(ctx.self_pose[1])])
    cost = np.sqrt(((targets - pos) ** 2).sum(axis=1))
    return int(np.argmax(utility(ig, cost)))


def nearest_frontier(ctx: PlannerContext):
    frontier = np.flatnonzero(frontier_mask(ctx.merged_belief.cells))
    if frontier.size == 0:
        return None
    centers = cell_centers(ctx.merged_belief, frontier)
    pos = np.array([float(ctx.self_pose[0]), float(ctx.self_pose[1])])
    k = int(np.argmin(((centers - pos) ** 2).sum(axis=1)))
    return float(centers[k, 0]), float(centers[k, 1])


class RrtPlanner:
    name = "rrt"

    def __init__(self, cfg: RrtConfig | None = None):
        self.cfg = cfg or RrtConfig()
        self._trees = {}

    def __call__(self, ctx: PlannerContext):
        previous = self._trees.get(ctx.agent_id) if self.cfg.persist_tree else None
        nodes, _, targets = grow_tree(ctx, self.cfg, previous)
        if self.cfg.persist_tree:
            self._trees[ctx.agent_id] = nodes
        if len(targets):
            k = select_target(ctx, targets, self.cfg.ig_radius)
            return float(targets[k, 0]), float(targets[k, 1])
        goal = nearest_frontier(ctx)
        if goal is None:
            raise ExplorationComplete("no RRT targets and no frontiers left")
        return goal


def rrt_plan(ctx: PlannerContext, cfg: RrtConfig | None = None):
    """Goal from a freshly grown tree: the unknown-space target maximising IG - N."""
    return RrtPlanner(cfg)(ctx)
