"""Compiled grid kernels shared by the planners and the navigation layer."""

from __future__ import annotations

import math

import numba
import numpy as np

UNREACHED = -1

_N4 = np.array([[-1, 0], [1, 0], [0, -1], [0, 1]], dtype=np.int64)
_N8 = np.array(
    [[-1, 0], [1, 0], [0, -1], [0, 1], [-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=np.int64
)


@numba.njit(cache=True)
def _bfs(passable, sources, moves):
    height, width = passable.shape
    n = height * width
    dist = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for s in sources:
        if dist[s] == -1:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        cur = queue[head]
        head += 1
        row = cur // width
        col = cur - row * width
        for k in range(moves.shape[0]):
            r = row + moves[k, 0]
            c = col + moves[k, 1]
            if r < 0 or r >= height or c < 0 or c >= width:
                continue
            if not passable[r, c]:
                continue
            nxt = r * width + c
            if dist[nxt] != -1:
                continue
            dist[nxt] = dist[cur] + 1
            parent[nxt] = cur
            queue[tail] = nxt
            tail += 1
    return dist, parent


def bfs(passable: np.ndarray, sources, connectivity: int = 4):
    """Multi-source BFS over ``passable`` cells.

    Returns ``(dist, parent)`` as flat int64 arrays; unreached cells hold
    ``UNREACHED`` in both. Sources are seeded even if not passable themselves.
    """
    moves = _N4 if connectivity == 4 else _N8
    sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
    return _bfs(np.ascontiguousarray(passable, dtype=np.bool_), sources, moves)


def path_to(parent: np.ndarray, target: int) -> np.ndarray:
    """Cells from the BFS root to ``target`` following parent links."""
    path = []
    cur = int(target)
    while cur != -1:
        path.append(cur)
        cur = int(parent[cur])
    return np.array(path[::-1], dtype=np.int64)


@numba.njit(cache=True)
def segment_clear(cells, res, x0, y0, x1, y1, eps):
    """True if no cell on the supercover of the segment is an obstacle (state 2).

    At an exact corner crossing both side cells count as touched.
    """
    height, width = cells.shape
    ox = x0 / res
    oy = y0 / res
    ex = x1 / res
    ey = y1 / res
    length = math.sqrt((ex - ox) * (ex - ox) + (ey - oy) * (ey - oy))
    col = int(math.floor(ox))
    row = int(math.floor(oy))
    if cells[row, col] == 2:
        return False
    if length == 0.0:
        return True
    dx = (ex - ox) / length
    dy = (ey - oy) / length
    step_c = 1 if dx > 0 else -1
    step_r = 1 if dy > 0 else -1
    if dx != 0.0:
        t_x = ((col + 1.0 - ox) if dx > 0 else (ox - col)) / abs(dx)
        d_x = 1.0 / abs(dx)
    else:
        t_x = np.inf
        d_x = np.inf
    if dy != 0.0:
        t_y = ((row + 1.0 - oy) if dy > 0 else (oy - row)) / abs(dy)
        d_y = 1.0 / abs(dy)
    else:
        t_y = np.inf
        d_y = np.inf
    while True:
        if abs(t_x - t_y) <= eps:
            if min(t_x, t_y) > length:
                return True
            ca = col + step_c
            rb = row + step_r
            if 0 <= ca < width and cells[row, ca] == 2:
                return False
            if 0 <= rb < height and cells[rb, col] == 2:
                return False
            col = ca
            row = rb
            t_x += d_x
            t_y += d_y
        elif t_x < t_y:
            if t_x > length:
                return True
            col += step_c
            t_x += d_x
        else:
            if t_y > length:
                return True
            row += step_r
            t_y += d_y
        if col < 0 or col >= width or row < 0 or row >= height:
            return False
        if cells[row, col] == 2:
            return False
