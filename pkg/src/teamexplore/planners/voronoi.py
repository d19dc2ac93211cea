"""Voronoi-partition frontier planner."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigurationError, DomainError, ExplorationComplete
from ..world.analysis import frontier_mask
from ..world.grid import FREE, OccupancyGrid
from .common import PlannerContext, cell_centers, info_gain_many, utility

NO_LABEL = -1


@dataclass(frozen=True)
class VoronoiConfig:
    ig_radius: float = 10.0

    def __post_init__(self):
        if not self.ig_radius > 0:
            raise ConfigurationError("Voronoi ig_radius must be positive")

    def to_dict(self):
        return asdict(self)


def voronoi_partition(belief: OccupancyGrid, agent_positions) -> np.ndarray:
    """Label every FREE cell with the index of the nearest agent (lowest index on ties).

    Non-free cells get ``NO_LABEL``. Returns a (height, width) int array.
    """
    agents = np.asarray(agent_positions, dtype=np.float64).reshape(-1, 2)
    if agents.shape[0] == 0:
        raise DomainError("voronoi_partition needs at least one agent")
    labels = np.full(belief.width * belief.height, NO_LABEL, dtype=np.int64)
    free = np.flatnonzero(belief.flat == FREE)
    if free.size:
        centers = cell_centers(belief, free)
        best = np.full(free.size, np.inf)
        owner = np.zeros(free.size, dtype=np.int64)
        for i, (ax, ay) in enumerate(agents):
            dx = centers[:, 0] - ax
            dy = centers[:, 1] - ay
            d2 = dx * dx + dy * dy
            closer = d2 < best
            best[closer] = d2[closer]
            owner[closer] = i
        labels[free] = owner
    return labels.reshape(belief.shape)


def best_frontier(belief: OccupancyGrid, candidates: np.ndarray, pose, ig_radius: float) -> int:
    """Candidate cell with the highest IG_norm - N_norm; lowest index on ties."""
    candidates = np.sort(np.asarray(candidates, dtype=np.int64))
    centers = cell_centers(belief, candidates)
    ig = info_gain_many(belief, centers, ig_radius)
    dx = centers[:, 0] - float(pose[0])
    dy = centers[:, 1] - float(pose[1])
    u = utility(ig, np.sqrt(dx * dx + dy * dy))
    return int(candidates[int(np.argmax(u))])


class VoronoiPlanner:
    name = "voronoi"

    def __init__(self, cfg: VoronoiConfig | None = None):
        self.cfg = cfg or VoronoiConfig()

    def __call__(self, ctx: PlannerContext):
        belief = ctx.merged_belief
        frontier = np.flatnonzero(frontier_mask(belief.cells))
        if frontier.size == 0:
            raise ExplorationComplete("no frontiers left")
        labels = voronoi_partition(belief, ctx.positions()).reshape(-1)
        mine = frontier[labels[frontier] == ctx.agent_id]
        candidates = mine if mine.size else frontier
        return belief.center_of(best_frontier(belief, candidates, ctx.self_pose, self.cfg.ig_radius))


def voronoi_plan(ctx: PlannerContext, cfg: VoronoiConfig | None = None):
    """Best-utility frontier inside the agent's Voronoi region, else anywhere."""
    return VoronoiPlanner(cfg)(ctx)
