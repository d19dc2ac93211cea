"""Global path to a goal on the belief, and the lookahead point fed to DWA.

DWA only scores straight-line distance to its target, which traps a vehicle
behind maze walls. The navigator plans a grid path (unknown cells count as
traversable, cells next to known obstacles do not) and hands DWA a point a
fixed distance ahead along it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..gridsearch import UNREACHED, bfs, path_to
from ..world.grid import OBSTACLE

_INFLATE = np.ones((3, 3), dtype=bool)


class Navigator:
    def __init__(self, resolution: float, lookahead: float = 4.0):
        self.resolution = resolution
        self.lookahead = lookahead
        self.goal = None
        self.path = np.zeros((0, 2))
        self._cells = np.zeros(0, dtype=np.int64)
        self._progress = 0

    def plan(self, belief: np.ndarray, position, goal) -> None:
        self.goal = (float(goal[0]), float(goal[1]))
        height, width = belief.shape
        res = self.resolution
        obstacles = belief == OBSTACLE
        passable = ~ndimage.binary_dilation(obstacles, structure=_INFLATE)
        start = int(position[1] // res) * width + int(position[0] // res)
        dist, parent = bfs(passable, [start], 8)
        if not passable.flat[start]:
            # start inside the inflated band: allow leaving it through free cells
            dist, parent = bfs(passable | (belief != OBSTACLE), [start], 8)
        reached = np.flatnonzero(dist != UNREACHED)
        rows, cols = np.divmod(reached, width)
        d2 = ((cols + 0.5) * res - self.goal[0]) ** 2 + ((rows + 0.5) * res - self.goal[1]) ** 2
        target = int(reached[int(np.argmin(d2))])
        cells = path_to(parent, target)
        rows, cols = np.divmod(cells, width)
        path = np.column_stack([(cols + 0.5) * res, (rows + 0.5) * res])
        if target != -1 and math.hypot(path[-1, 0] - self.goal[0], path[-1, 1] - self.goal[1]) < res:
            path[-1] = self.goal
        self._cells = cells
        self.path = path
        self._progress = 0

    def blocked(self, belief: np.ndarray) -> bool:
        """True if a known obstacle now sits on or next to the remaining path."""
        if self._cells.size == 0:
            return False
        height, width = belief.shape
        ahead = self._cells[self._progress:]
        rows, cols = np.divmod(ahead, width)
        for dr in (-1, 0, 1):
            r = np.clip(rows + dr, 0, height - 1)
            for dc in (-1, 0, 1):
                c = np.clip(cols + dc, 0, width - 1)
                if np.any(belief[r, c] == OBSTACLE):
                    return True
        return False

    def carrot(self, position) -> tuple[float, float]:
        """Point ``lookahead`` metres further along the path from the closest path point."""
        if len(self.path) == 0:
            return self.goal
        pos = np.asarray(position[:2], dtype=float)
        window = self.path[self._progress:self._progress + int(4 * self.lookahead / self.resolution) + 2]
        d = np.sqrt(((window - pos) ** 2).sum(axis=1))
        self._progress += int(np.argmin(d))
        rest = self.path[self._progress:]
        d = np.sqrt(((rest - pos) ** 2).sum(axis=1))
        beyond = np.flatnonzero(d >= self.lookahead)
        k = int(beyond[0]) if beyond.size else len(rest) - 1
        return float(rest[k, 0]), float(rest[k, 1])
