"""Multi-agent potential-field (mmPF) frontier planner."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..errors import ConfigurationError, DomainError, ExplorationComplete
from ..gridsearch import UNREACHED, bfs
from ..world.analysis import frontier_mask
from ..world.grid import FREE, OccupancyGrid
from .common import PlannerContext


@dataclass(frozen=True)
class MmpfConfig:
    w_a: float = 1.0
    w_r: float = 25.0
    linkage_radius: int = 2

    def __post_init__(self):
        if self.w_a < 0 or self.w_r < 0 or self.linkage_radius < 0:
            raise ConfigurationError("mmPF weights and linkage radius must be >= 0")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class FrontierGroup:
    cells: np.ndarray  # sorted flat indices
    centroid: int


def cluster_frontiers(frontiers, width: int, linkage_radius: int = 2) -> list[FrontierGroup]:
    """Group frontier cells whose Chebyshev distance is within ``linkage_radius`` (transitively).

    Groups come out ordered by their smallest cell index. The centroid is the
    member cell nearest to the arithmetic mean (lowest index on ties).
    """
    cells = np.array(sorted(int(c) for c in frontiers), dtype=np.int64)
    if cells.size == 0:
        return []
    rows, cols = np.divmod(cells, width)
    coords = np.column_stack([rows, cols]).astype(np.float64)
    pairs = cKDTree(coords).query_pairs(r=linkage_radius + 1e-9, p=np.inf, output_type="ndarray")
    n = cells.size
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
    n_groups, labels = connected_components(graph, directed=False)
    groups = []
    for label in range(n_groups):
        member = labels == label
        mcells = cells[member]
        mcoords = coords[member]
        mean = mcoords.mean(axis=0)
        d2 = ((mcoords - mean) ** 2).sum(axis=1)
        groups.append(FrontierGroup(mcells, int(mcells[int(np.argmin(d2))])))
    groups.sort(key=lambda g: int(g.cells[0]))
    return groups


def bfs_distance_map(belief: OccupancyGrid, source) -> np.ndarray:
    """4-connected BFS distances (in cells) over FREE cells; UNREACHED elsewhere.

    ``source`` is a flat index or a (row, col) pair. Returns a (height, width) array.
    """
    if isinstance(source, (int, np.integer)):
        idx = int(source)
    else:
        idx = int(source[0]) * belief.width + int(source[1])
    if not 0 <= idx < belief.width * belief.height:
        raise DomainError(f"source {source} outside the grid")
    if belief.flat[idx] != FREE:
        raise DomainError(f"source {source} is not a FREE cell")
    dist, _ = bfs(belief.cells == FREE, [idx], 4)
    return dist.reshape(belief.shape)


def potential_field(belief: OccupancyGrid, groups, teammate_cells, cfg: MmpfConfig) -> np.ndarray:
    """F = -sum_g |g| w_a / (d_g + 1) + sum_j w_r / (d_j + 1); unreached terms contribute 0."""
    free = belief.cells == FREE
    field = np.zeros(belief.width * belief.height)
    for group in groups:
        dist, _ = bfs(free, [group.centroid], 4)
        ok = dist != UNREACHED
        field[ok] -= len(group.cells) * cfg.w_a / (dist[ok] + 1.0)
    if cfg.w_r > 0:
        for cell in teammate_cells:
            if belief.flat[cell] != FREE:
                continue
            dist, _ = bfs(free, [cell], 4)
            ok = dist != UNREACHED
            field[ok] += cfg.w_r / (dist[ok] + 1.0)
    return field.reshape(belief.shape)


def descend(field: np.ndarray, free: np.ndarray, start: int, stop_mask: np.ndarray) -> list[int]:
    """Greedy walk to the lowest 8-neighbour while the potential strictly decreases."""
    height, width = field.shape
    path = [int(start)]
    cur = int(start)
    while not stop_mask.flat[cur]:
        row, col = divmod(cur, width)
        best, best_val = -1, field.flat[cur]
        for dr, dc in ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)):
            r, c = row + dr, col + dc
            if 0 <= r < height and 0 <= c < width and free[r, c] and field[r, c] < best_val:
                best, best_val = r * width + c, field[r, c]
        if best < 0:
            break
        cur = best
        path.append(cur)
    return path


class MmpfPlanner:
    name = "mmpf"

    def __init__(self, cfg: MmpfConfig | None = None):
        self.cfg = cfg or MmpfConfig()

    def field_for(self, ctx: PlannerContext):
        belief = ctx.merged_belief
        frontier = frontier_mask(belief.cells)
        groups = cluster_frontiers(np.flatnonzero(frontier), belief.width, self.cfg.linkage_radius)
        teammates = []
        for agent, pose in sorted(ctx.teammate_poses.items()):
            if agent != ctx.agent_id and belief.contains(float(pose[0]), float(pose[1])):
                teammates.append(belief.index_of(float(pose[0]), float(pose[1])))
        return potential_field(belief, groups, teammates, self.cfg), frontier, groups

    def __call__(self, ctx: PlannerContext):
        belief = ctx.merged_belief
        field, frontier, groups = self.field_for(ctx)
        if not groups:
            raise ExplorationComplete("no frontiers left")
        start = belief.index_of(float(ctx.self_pose[0]), float(ctx.self_pose[1]))
        path = descend(field, belief.cells == FREE, start, frontier)
        return belief.center_of(path[-1])


def mmpf_plan(ctx: PlannerContext, cfg: MmpfConfig | None = None):
    """Goal at the end of a steepest-descent walk over the potential field."""
    return MmpfPlanner(cfg)(ctx)
