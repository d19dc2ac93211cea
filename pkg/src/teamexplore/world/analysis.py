"""Map merging, frontier detection and coverage accounting."""

from __future__ import annotations

from functools import reduce

import numpy as np
from scipy import ndimage

from ..errors import DomainError
from .grid import FREE, UNKNOWN, OccupancyGrid


def merge_maps(beliefs) -> OccupancyGrid:
    """Cell-wise join: any known state beats UNKNOWN, OBSTACLE beats FREE."""
    beliefs = list(beliefs)
    if not beliefs:
        raise DomainError("merge_maps needs at least one belief")
    first = beliefs[0]
    for other in beliefs[1:]:
        first.require_same_geometry(other)
    if len(beliefs) == 1:
        return first
    merged = reduce(np.maximum, (b.cells for b in beliefs))
    return first.with_cells(merged)


def frontier_mask(cells: np.ndarray, connectivity: int = 4) -> np.ndarray:
    """Boolean mask of FREE cells adjacent to at least one UNKNOWN cell."""
    unknown = cells == UNKNOWN
    padded = np.pad(unknown, 1, constant_values=False)
    near = (
        padded[:-2, 1:-1] | padded[2:, 1:-1] | padded[1:-1, :-2] | padded[1:-1, 2:]
    )
    if connectivity == 8:
        near |= padded[:-2, :-2] | padded[:-2, 2:] | padded[2:, :-2] | padded[2:, 2:]
    elif connectivity != 4:
        raise DomainError(f"connectivity must be 4 or 8, got {connectivity}")
    return (cells == FREE) & near


def detect_frontiers(belief: OccupancyGrid, connectivity: int = 4) -> frozenset:
    """Flat indices of frontier cells (FREE cells next to UNKNOWN space)."""
    return frozenset(np.flatnonzero(frontier_mask(belief.cells, connectivity)).tolist())


def reachable_mask(cells: np.ndarray, start_row: int, start_col: int) -> np.ndarray:
    free = cells == FREE
    labels, _ = ndimage.label(free, structure=ndimage.generate_binary_structure(2, 1))
    return labels == labels[start_row, start_col]


def reachable_free_cells(truth: OccupancyGrid, start) -> frozenset:
    """4-connected flood fill over FREE cells from ``start`` (row, col) or flat index."""
    if isinstance(start, (int, np.integer)):
        row, col = divmod(int(start), truth.width)
    else:
        row, col = int(start[0]), int(start[1])
    if not (0 <= row < truth.height and 0 <= col < truth.width):
        raise DomainError(f"start cell ({row}, {col}) outside the grid")
    if truth.cells[row, col] != FREE:
        raise DomainError(f"start cell ({row}, {col}) is not FREE")
    return frozenset(np.flatnonzero(reachable_mask(truth.cells, row, col)).tolist())


def exploration_ratio(belief: OccupancyGrid, reachable) -> float:
    """Fraction of the reachable cells that the belief has observed."""
    if isinstance(reachable, np.ndarray) and reachable.dtype == bool:
        idx = np.flatnonzero(reachable)
    else:
        idx = np.fromiter(reachable, dtype=np.int64, count=len(reachable))
    if idx.size == 0:
        raise DomainError("reachable set is empty")
    known = belief.flat[idx] != UNKNOWN
    return float(np.count_nonzero(known)) / float(idx.size)
