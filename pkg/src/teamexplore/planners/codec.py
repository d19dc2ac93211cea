"""Bi-level goal codec: patch index plus in-patch offset on an 8x8 patch grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

PATCHES_PER_SIDE = 8


@dataclass(frozen=True)
class PatchGrid:
    L_w: float
    L_h: float
    patches_per_side: int = PATCHES_PER_SIDE

    def __post_init__(self):
        if not self.L_w > 0 or not self.L_h > 0:
            raise DomainError("patch dimensions must be positive")

    @classmethod
    def for_map(cls, side_x: float, side_y: float | None = None, patches_per_side: int = PATCHES_PER_SIDE):
        side_y = side_x if side_y is None else side_y
        return cls(side_x / patches_per_side, side_y / patches_per_side, patches_per_side)

    @property
    def n_patches(self) -> int:
        return self.patches_per_side * self.patches_per_side


@dataclass(frozen=True)
class BiLevelAction:
    g: int
    x: float
    y: float

    def __post_init__(self):
        if not 0 <= self.g < PATCHES_PER_SIDE * PATCHES_PER_SIDE:
            raise DomainError(f"patch index {self.g} out of range")
        if not (-1.0 <= self.x <= 1.0 and -1.0 <= self.y <= 1.0):
            raise DomainError(f"offsets ({self.x}, {self.y}) outside [-1, 1]")

    def to_list(self) -> list:
        return [self.g, self.x, self.y]


def _decode_axis(patch: int, offset: float, length: float) -> float:
    return (2 * patch + 1 + offset) * length / 2


def decode_goal(a: BiLevelAction, pg: PatchGrid) -> tuple[float, float]:
    n = pg.patches_per_side
    return _decode_axis(a.g // n, a.x, pg.L_w), _decode_axis(a.g % n, a.y, pg.L_h)


def _encode_axis(value: float, length: float, n: int) -> tuple[int, float]:
    # boundary points belong to the lower-index patch
    patch = min(max(int(math.ceil(value / length)) - 1, 0), n - 1)
    guess = min(max(2.0 * value / length - 2 * patch - 1, -1.0), 1.0)
    if _decode_axis(patch, guess, length) == value:
        return patch, guess
    # walk a few ulps either side for an offset that decodes exactly
    best, best_err = guess, abs(_decode_axis(patch, guess, length) - value)
    for direction in (math.inf, -math.inf):
        cand = guess
        for _ in range(64):
            cand = math.nextafter(cand, direction)
            if not -1.0 <= cand <= 1.0:
                break
            err = abs(_decode_axis(patch, cand, length) - value)
            if err < best_err:
                best, best_err = cand, err
            if err == 0.0:
                return patch, cand
    return patch, best


def encode_goal(p, pg: PatchGrid) -> BiLevelAction:
    """Inverse of :func:`decode_goal` for points inside the map.

    The offsets are chosen so that decoding reproduces ``p`` exactly whenever
    that value is reachable in floating point; otherwise the closest decodable
    point is used (within a few ulps).
    """
    x, y = float(p[0]), float(p[1])
    n = pg.patches_per_side
    if not (0.0 <= x <= n * pg.L_w and 0.0 <= y <= n * pg.L_h):
        raise DomainError(f"point ({x}, {y}) lies outside the map")
    ix, ox = _encode_axis(x, pg.L_w, n)
    iy, oy = _encode_axis(y, pg.L_h, n)
    return BiLevelAction(ix * n + iy, ox, oy)


def quantize_goal(p, pg: PatchGrid) -> tuple[BiLevelAction, tuple[float, float]]:
    """Express a world goal as an action and return the goal that action decodes to."""
    action = encode_goal(p, pg)
    return action, decode_goal(action, pg)


def patch_bounds(g: int, pg: PatchGrid) -> tuple[float, float, float, float]:
    n = pg.patches_per_side
    ix, iy = divmod(g, n)
    return ix * pg.L_w, (ix + 1) * pg.L_w, iy * pg.L_h, (iy + 1) * pg.L_h


def random_actions(rng: np.random.Generator, count: int) -> list[BiLevelAction]:
    gs = rng.integers(0, PATCHES_PER_SIDE * PATCHES_PER_SIDE, size=count)
    offs = rng.uniform(-1.0, 1.0, size=(count, 2))
    return [BiLevelAction(int(g), float(o[0]), float(o[1])) for g, o in zip(gs, offs)]
