"""Planner inputs and the utility shared by the frontier planners."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from ..errors import DomainError
from ..world.grid import OccupancyGrid


@dataclass
class PlannerContext:
    """Snapshot handed to a planner for one decision of one agent.

    ``teammate_poses`` maps agent id to the last known (x, y) of that teammate,
    which may be stale when messages were dropped.
    """

    agent_id: int
    own_belief: OccupancyGrid
    merged_belief: OccupancyGrid
    self_pose: tuple
    teammate_poses: dict = field(default_factory=dict)
    rng: np.random.Generator | None = None

    def positions(self) -> list[tuple[float, float]]:
        """All agent positions indexed by agent id, self included."""
        n = max([self.agent_id, *self.teammate_poses]) + 1
        out = []
        for i in range(n):
            if i == self.agent_id:
                out.append((float(self.self_pose[0]), float(self.self_pose[1])))
            elif i in self.teammate_poses:
                p = self.teammate_poses[i]
                out.append((float(p[0]), float(p[1])))
            else:
                raise DomainError(f"no pose known for agent {i}")
        return out


def minmax_normalize(values) -> np.ndarray:
    """Scale to [0, 1]; a constant input maps to all zeros."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return values
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def utility(ig, cost) -> np.ndarray:
    """u = IG_norm - N_norm, each min-max normalised over the candidates."""
    return minmax_normalize(ig) - minmax_normalize(cost)


@numba.njit(cache=True)
def _count_unknown(cells, res, pts, radius):
    height, width = cells.shape
    out = np.zeros(pts.shape[0], dtype=np.int64)
    r2 = radius * radius
    for k in range(pts.shape[0]):
        x = pts[k, 0]
        y = pts[k, 1]
        c_lo = max(int(math.floor((x - radius) / res)) - 1, 0)
        c_hi = min(int(math.floor((x + radius) / res)) + 1, width - 1)
        r_lo = max(int(math.floor((y - radius) / res)) - 1, 0)
        r_hi = min(int(math.floor((y + radius) / res)) + 1, height - 1)
        total = 0
        for row in range(r_lo, r_hi + 1):
            dy = (row + 0.5) * res - y
            for col in range(c_lo, c_hi + 1):
                if cells[row, col] == 0:
                    dx = (col + 0.5) * res - x
                    if dx * dx + dy * dy <= r2:
                        total += 1
        out[k] = total
    return out


def info_gain_many(belief: OccupancyGrid, points, radius: float) -> np.ndarray:
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    if not radius > 0:
        raise DomainError(f"radius must be > 0, got {radius}")
    return _count_unknown(belief.cells, float(belief.resolution), pts, float(radius))


def info_gain(belief: OccupancyGrid, c, radius: float) -> int:
    """Number of UNKNOWN cells whose centers lie within ``radius`` of point ``c``."""
    return int(info_gain_many(belief, [c], radius)[0])


def cell_centers(belief: OccupancyGrid, indices) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    rows, cols = np.divmod(indices, belief.width)
    res = belief.resolution
    return np.column_stack([(cols + 0.5) * res, (rows + 0.5) * res])
