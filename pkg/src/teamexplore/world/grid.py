"""Occupancy grid value type and its on-disk formats."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from ..errors import DomainError

MAGIC = b"TXGRID"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<6sHIId")


class CellState(IntEnum):
    # Ordered so that the lattice join of two observations is np.maximum.
    UNKNOWN = 0
    FREE = 1
    OBSTACLE = 2


UNKNOWN = np.uint8(CellState.UNKNOWN)
FREE = np.uint8(CellState.FREE)
OBSTACLE = np.uint8(CellState.OBSTACLE)


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """A 2D ternary cell field.

    ``cells`` has shape ``(height, width)``; flat cell indices are row-major,
    ``index = row * width + col``, where ``row`` follows world ``y`` and ``col``
    follows world ``x``. The array is made read-only on construction.
    """

    width: int
    height: int
    resolution: float
    cells: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DomainError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        if not self.resolution > 0:
            raise DomainError(f"resolution must be > 0, got {self.resolution}")
        cells = np.asarray(self.cells, dtype=np.uint8)
        if cells.size != self.width * self.height:
            raise DomainError(
                f"cell array has {cells.size} entries, expected {self.width * self.height}"
            )
        cells = cells.reshape(self.height, self.width)
        if cells.size and cells.max() > OBSTACLE:
            raise DomainError("cell values must be UNKNOWN, FREE or OBSTACLE")
        if cells.flags.writeable:
            cells = cells.copy()
            cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @classmethod
    def filled(cls, width: int, height: int, resolution: float, state=CellState.UNKNOWN):
        return cls(width, height, resolution, np.full((height, width), state, dtype=np.uint8))

    def with_cells(self, cells: np.ndarray) -> "OccupancyGrid":
        return OccupancyGrid(self.width, self.height, self.resolution, cells)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def flat(self) -> np.ndarray:
        return self.cells.reshape(-1)

    @property
    def side_x(self) -> float:
        return self.width * self.resolution

    @property
    def side_y(self) -> float:
        return self.height * self.resolution

    def same_geometry(self, other) -> bool:
        return (
            self.width == other.width
            and self.height == other.height
            and self.resolution == other.resolution
        )

    def require_same_geometry(self, other) -> None:
        if not self.same_geometry(other):
            raise DomainError(
                f"geometry mismatch: {self.width}x{self.height}@{self.resolution} vs "
                f"{other.width}x{other.height}@{other.resolution}"
            )

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x < self.side_x and 0.0 <= y < self.side_y

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """(row, col) of the cell containing a world point."""
        if not self.contains(x, y):
            raise DomainError(f"point ({x}, {y}) lies outside the grid")
        return int(math.floor(y / self.resolution)), int(math.floor(x / self.resolution))

    def index_of(self, x: float, y: float) -> int:
        row, col = self.cell_of(x, y)
        return row * self.width + col

    def center_of(self, index: int) -> tuple[float, float]:
        row, col = divmod(int(index), self.width)
        return (col + 0.5) * self.resolution, (row + 0.5) * self.resolution

    def count(self, state: CellState) -> int:
        return int(np.count_nonzero(self.cells == state))

    def known_mask(self) -> np.ndarray:
        return self.cells != UNKNOWN

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return self.same_geometry(other) and np.array_equal(self.cells, other.cells)

    def __repr__(self):
        return (
            f"OccupancyGrid({self.width}x{self.height}@{self.resolution}m, "
            f"free={self.count(CellState.FREE)}, obstacle={self.count(CellState.OBSTACLE)})"
        )

    # -- serialization -------------------------------------------------

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, self.width, self.height, float(self.resolution))
        return header + self.cells.tobytes(order="C")

    @classmethod
    def from_bytes(cls, data: bytes) -> "OccupancyGrid":
        if len(data) < _HEADER.size:
            raise DomainError("truncated grid file")
        magic, version, width, height, resolution = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise DomainError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise DomainError(f"unsupported grid format version {version}")
        body = data[_HEADER.size:]
        if len(body) != width * height:
            raise DomainError(f"expected {width * height} cell bytes, got {len(body)}")
        return cls(width, height, resolution, np.frombuffer(body, dtype=np.uint8))

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "OccupancyGrid":
        return cls.from_bytes(Path(path).read_bytes())

    def to_pgm(self) -> bytes:
        """Binary PGM: unknown gray, free white, obstacle black; top row = max y."""
        palette = np.array([128, 255, 0], dtype=np.uint8)
        image = palette[self.cells][::-1]
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + image.tobytes()
