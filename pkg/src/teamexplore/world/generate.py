"""Ground-truth world generators.

Both generators are pure functions of their arguments: the same inputs give
bit-identical grids. Outputs are fully known (no UNKNOWN cells), surrounded by
an obstacle border, and their free space is a single 4-connected component.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..errors import ConfigurationError, GenerationError
from .grid import FREE, OBSTACLE, OccupancyGrid

_FOUR = ndimage.generate_binary_structure(2, 1)


def grid_cells(side: float, resolution: float) -> int:
    if not side > 0 or not resolution > 0:
        raise ConfigurationError(f"side and resolution must be positive ({side}, {resolution})")
    n = side / resolution
    cells = int(round(n))
    if cells < 3 or abs(n - cells) > 1e-9 * max(1.0, n):
        raise ConfigurationError(
            f"side {side} / resolution {resolution} must give an integer cell count >= 3"
        )
    return cells


def _open_room(n: int, border: int) -> np.ndarray:
    cells = np.full((n, n), OBSTACLE, dtype=np.uint8)
    border = min(border, (n - 1) // 2)
    cells[border:n - border, border:n - border] = FREE
    return cells


def generate_maze(
    seed: int,
    side: float = 125.0,
    resolution: float = 1.0,
    corridor_width: int = 3,
    wall_thickness: int = 1,
    braid: float = 0.0,
) -> OccupancyGrid:
    """Recursive-backtracker maze carved on a coarse lattice.

    Each lattice node is a ``corridor_width`` square room; neighbouring rooms are
    joined through ``wall_thickness``-deep openings of the same width. ``braid``
    is the probability that a dead end gets one extra opening, which adds loops.
    If not even one room fits, the result is a single open room.
    """
    n = grid_cells(side, resolution)
    if corridor_width < 2:
        raise ConfigurationError(f"corridor_width must be >= 2, got {corridor_width}")
    if wall_thickness < 1:
        raise ConfigurationError(f"wall_thickness must be >= 1, got {wall_thickness}")
    if not 0.0 <= braid <= 1.0:
        raise ConfigurationError(f"braid must be in [0, 1], got {braid}")

    pitch = corridor_width + wall_thickness
    m = (n - wall_thickness) // pitch
    if m < 1:
        return OccupancyGrid(n, n, resolution, _open_room(n, 1))

    rng = np.random.default_rng(seed)
    origin = (n - wall_thickness - m * pitch) // 2 + wall_thickness
    cells = np.full((n, n), OBSTACLE, dtype=np.uint8)

    def room(i, j):
        r0 = origin + i * pitch
        c0 = origin + j * pitch
        cells[r0:r0 + corridor_width, c0:c0 + corridor_width] = FREE

    def open_between(a, b):
        (i0, j0), (i1, j1) = sorted((a, b))
        r0 = origin + i0 * pitch
        c0 = origin + j0 * pitch
        if i0 == i1:
            cells[r0:r0 + corridor_width, c0 + corridor_width:c0 + pitch] = FREE
        else:
            cells[r0 + corridor_width:r0 + pitch, c0:c0 + corridor_width] = FREE

    def neighbours(i, j):
        for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            a, b = i + di, j + dj
            if 0 <= a < m and 0 <= b < m:
                yield a, b

    for i in range(m):
        for j in range(m):
            room(i, j)

    links = {(i, j): set() for i in range(m) for j in range(m)}
    start = (int(rng.integers(m)), int(rng.integers(m)))
    visited = {start}
    stack = [start]
    while stack:
        node = stack[-1]
        options = [nb for nb in neighbours(*node) if nb not in visited]
        if not options:
            stack.pop()
            continue
        nxt = options[int(rng.integers(len(options)))]
        open_between(node, nxt)
        links[node].add(nxt)
        links[nxt].add(node)
        visited.add(nxt)
        stack.append(nxt)

    if braid > 0.0:
        for node in sorted(links):
            if len(links[node]) != 1 or rng.random() >= braid:
                continue
            closed = [nb for nb in neighbours(*node) if nb not in links[node]]
            if not closed:
                continue
            nxt = closed[int(rng.integers(len(closed)))]
            open_between(node, nxt)
            links[node].add(nxt)
            links[nxt].add(node)

    return OccupancyGrid(n, n, resolution, cells)


def _free_connected(free: np.ndarray) -> bool:
    _, count = ndimage.label(free, structure=_FOUR)
    return count <= 1


def generate_random_obstacles(
    seed: int,
    side: float = 125.0,
    resolution: float = 1.0,
    density: float = 0.2,
    max_attempts: int = 20000,
) -> OccupancyGrid:
    """Room scattered with rectangular and circular obstacles.

    ``density`` is the target obstacle fraction of the interior. Obstacles are
    proposed one at a time; a proposal that would split the free space is
    rejected and a new one sampled.
    """
    n = grid_cells(side, resolution)
    if not 0.0 <= density < 0.5:
        raise ConfigurationError(f"density must be in [0, 0.5), got {density}")

    cells = _open_room(n, 1)
    interior = (n - 2) * (n - 2)
    target = int(math.ceil(density * interior))
    placed = 0
    if target == 0:
        return OccupancyGrid(n, n, resolution, cells)

    rng = np.random.default_rng(seed)
    max_rect = max(3, n // 10)
    max_radius = max(2, n // 25)
    rows, cols = np.mgrid[0:n, 0:n]
    for _ in range(max_attempts):
        if rng.random() < 0.5:
            h = int(rng.integers(2, max_rect + 1))
            w = int(rng.integers(2, max_rect + 1))
            r0 = int(rng.integers(1, n - 1 - h + 1))
            c0 = int(rng.integers(1, n - 1 - w + 1))
            mask = np.zeros((n, n), dtype=bool)
            mask[r0:r0 + h, c0:c0 + w] = True
        else:
            radius = float(rng.uniform(1.0, max_radius))
            cr = float(rng.uniform(1, n - 1))
            cc = float(rng.uniform(1, n - 1))
            mask = (rows + 0.5 - cr) ** 2 + (cols + 0.5 - cc) ** 2 <= radius * radius
            mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = False
        new = mask & (cells == FREE)
        gained = int(np.count_nonzero(new))
        if gained == 0:
            continue
        trial = cells.copy()
        trial[new] = OBSTACLE
        if not _free_connected(trial == FREE):
            continue
        cells = trial
        placed += gained
        if placed >= target:
            return OccupancyGrid(n, n, resolution, cells)
    raise GenerationError(
        f"could not reach obstacle density {density} with connected free space "
        f"after {max_attempts} proposals"
    )
