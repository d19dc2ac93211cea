"""Lidar simulation over a ground-truth grid and belief updates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from ..errors import DomainError
from .grid import FREE, OBSTACLE, OccupancyGrid

DEFAULT_ANGULAR_RESOLUTION = math.pi / 180.0
# Crossings of a vertical and a horizontal grid line closer than this (in
# cell units of ray parameter) are treated as passing through the corner.
CORNER_EPS = 1e-9


def beam_count(angular_resolution: float) -> int:
    if not angular_resolution > 0:
        raise DomainError(f"angular_resolution must be > 0, got {angular_resolution}")
    return max(1, int(math.ceil(2.0 * math.pi / angular_resolution - 1e-9)))


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Cells observed by one scan (or a union of scans) on a fixed geometry.

    ``freed_cells`` and ``obstacle_cells`` are sorted unique flat indices.
    """

    width: int
    height: int
    freed_cells: np.ndarray
    obstacle_cells: np.ndarray
    hit_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    @classmethod
    def empty(cls, width: int, height: int) -> "ScanResult":
        nothing = np.zeros(0, dtype=np.int64)
        return cls(width, height, nothing, nothing)

    @property
    def observed_cells(self) -> np.ndarray:
        return np.union1d(self.freed_cells, self.obstacle_cells)

    def union(self, other: "ScanResult") -> "ScanResult":
        if (self.width, self.height) != (other.width, other.height):
            raise DomainError("cannot union scans of different geometry")
        return ScanResult(
            self.width,
            self.height,
            np.union1d(self.freed_cells, other.freed_cells),
            np.union1d(self.obstacle_cells, other.obstacle_cells),
            np.concatenate([self.hit_points, other.hit_points]),
        )


@numba.njit(cache=True)
def _cast(cells, res, px, py, heading, max_range, n_beams, eps):
    height, width = cells.shape
    ox = px / res
    oy = py / res
    t_max = max_range / res
    c0 = int(math.floor(ox))
    r0 = int(math.floor(oy))

    cap = n_beams * (4 * int(t_max + 3) + 4) + 1
    freed = np.empty(cap, dtype=np.int64)
    hits = np.empty(2 * n_beams + 1, dtype=np.int64)
    hit_xy = np.empty((n_beams, 2), dtype=np.float64)
    nf = 0
    nh = 0
    npts = 0
    freed[nf] = r0 * width + c0
    nf += 1

    for k in range(n_beams):
        angle = heading + 2.0 * math.pi * k / n_beams
        dx = math.cos(angle)
        dy = math.sin(angle)
        col = c0
        row = r0
        step_c = 1 if dx > 0 else -1
        step_r = 1 if dy > 0 else -1
        if dx != 0.0:
            next_x = (col + 1.0 - ox) if dx > 0 else (ox - col)
            t_x = next_x / abs(dx)
            d_x = 1.0 / abs(dx)
        else:
            t_x = np.inf
            d_x = np.inf
        if dy != 0.0:
            next_y = (row + 1.0 - oy) if dy > 0 else (oy - row)
            t_y = next_y / abs(dy)
            d_y = 1.0 / abs(dy)
        else:
            t_y = np.inf
            d_y = np.inf

        while True:
            if abs(t_x - t_y) <= eps:
                t = t_x if t_x < t_y else t_y
                if t > t_max:
                    break
                # Supercover: the ray touches both side cells at the corner.
                ca = col + step_c
                rb = row + step_r
                if ca < 0 or ca >= width or rb < 0 or rb >= height:
                    break
                side_a = cells[row, ca] == 2
                side_b = cells[rb, col] == 2
                if side_a or side_b:
                    if side_a:
                        hits[nh] = row * width + ca
                        nh += 1
                    if side_b:
                        hits[nh] = rb * width + col
                        nh += 1
                    hit_xy[npts, 0] = (ox + t * dx) * res
                    hit_xy[npts, 1] = (oy + t * dy) * res
                    npts += 1
                    break
                freed[nf] = row * width + ca
                nf += 1
                freed[nf] = rb * width + col
                nf += 1
                col = ca
                row = rb
                t_x += d_x
                t_y += d_y
            elif t_x < t_y:
                t = t_x
                if t > t_max:
                    break
                col += step_c
                if col < 0 or col >= width:
                    break
                t_x += d_x
            else:
                t = t_y
                if t > t_max:
                    break
                row += step_r
                if row < 0 or row >= height:
                    break
                t_y += d_y
            if cells[row, col] == 2:
                hits[nh] = row * width + col
                nh += 1
                hit_xy[npts, 0] = (ox + t * dx) * res
                hit_xy[npts, 1] = (oy + t * dy) * res
                npts += 1
                break
            freed[nf] = row * width + col
            nf += 1
    return freed[:nf], hits[:nh], hit_xy[:npts]


def raycast_scan(
    truth: OccupancyGrid,
    pose,
    range: float,
    angular_resolution: float = DEFAULT_ANGULAR_RESOLUTION,
) -> ScanResult:
    """Simulate a 360 degree lidar at ``pose = (x, y, heading)``.

    Beam ``k`` points at ``heading + 2*pi*k/n``. Each beam frees the cells it
    crosses until it enters an obstacle cell (recorded, beam stops) or exceeds
    ``range``. A beam passing exactly through a cell corner touches both side
    cells; if either is an obstacle the beam stops there.
    """
    x, y = float(pose[0]), float(pose[1])
    heading = float(pose[2]) if len(pose) > 2 else 0.0
    if not truth.contains(x, y):
        raise DomainError(f"scan pose ({x}, {y}) lies outside the grid")
    if range < 0:
        raise DomainError(f"range must be >= 0, got {range}")
    freed, hits, points = _cast(
        truth.cells, float(truth.resolution), x, y, heading, float(range),
        beam_count(angular_resolution), CORNER_EPS,
    )
    return ScanResult(truth.width, truth.height, np.unique(freed), np.unique(hits), points)


def apply_scan(cells: np.ndarray, scan: ScanResult) -> None:
    """In-place belief update on a raw (height, width) uint8 array."""
    flat = cells.reshape(-1)
    freed = scan.freed_cells
    flat[freed] = np.maximum(flat[freed], FREE)
    flat[scan.obstacle_cells] = OBSTACLE


def integrate_scan(belief: OccupancyGrid, scan: ScanResult) -> OccupancyGrid:
    """Return a new belief with the scan applied.

    Freed cells become FREE unless already OBSTACLE; obstacle cells become
    OBSTACLE. Known cells never revert to UNKNOWN.
    """
    if (belief.width, belief.height) != (scan.width, scan.height):
        raise DomainError(
            f"scan geometry {scan.width}x{scan.height} does not match belief "
            f"{belief.width}x{belief.height}"
        )
    cells = belief.cells.copy()
    apply_scan(cells, scan)
    return belief.with_cells(cells)
