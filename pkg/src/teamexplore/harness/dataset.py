"""Decision-tuple dataset export and the agent-centric map encoding.

Dataset layout: ``<out>.jsonl`` holds a header line and one JSON record per
(episode, decision, agent); arrays live in the sidecar ``<out>.bin`` and are
referenced by ``{"offset", "length", "shape", "dtype"}``. See docs/formats.md.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..planners import PatchGrid, decode_goal, encode_goal
from ..sim import EpisodeLog, replay
from ..world.grid import OBSTACLE, UNKNOWN

TENSOR_SIZE = 128
DATASET_VERSION = 1


def _blip_pixel(dx: float, dy: float, pixel: float, size: int, cos_t: float, sin_t: float):
    u = cos_t * dx + sin_t * dy
    v = -sin_t * dx + cos_t * dy
    col = math.floor(u / pixel + size / 2)
    row = math.floor(v / pixel + size / 2)
    return min(max(row, 0), size - 1), min(max(col, 0), size - 1)


def _nearest_free(taken: np.ndarray, row: int, col: int):
    """Closest untaken pixel by Chebyshev ring, scanning each ring in raster order."""
    size = taken.shape[0]
    for radius in range(1, size):
        best = None
        for r in range(row - radius, row + radius + 1):
            for c in range(col - radius, col + radius + 1):
                if max(abs(r - row), abs(c - col)) != radius:
                    continue
                if 0 <= r < size and 0 <= c < size and not taken[r, c]:
                    d = (r - row) ** 2 + (c - col) ** 2
                    if best is None or d < best[0]:
                        best = (d, r, c)
        if best is not None:
            return best[1], best[2]
    raise ValueError("no free pixel left for a position blip")


def encode_agent_centric(own_belief, merged_obstacles, self_pose, teammate_poses,
                         resolution: float = 1.0, size: int = TENSOR_SIZE,
                         rotate: bool = False) -> np.ndarray:
    """(size, size, 3) float32 map centred on ``self_pose``.

    The tensor spans the full map side, so one pixel is ``side / size`` metres.
    Pixels are sampled nearest-neighbour from the grid cell under their centre;
    pixels falling outside the world are zero. Channel 0 marks explored cells
    of ``own_belief``, channel 1 obstacles of ``merged_obstacles`` (a bool mask
    or a belief array), channel 2 one blip per agent, self first. Teammates out
    of view are clamped to the border, and a blip landing on an occupied pixel
    moves to the nearest free one, so channel 2 always holds one blip per agent.
    With ``rotate`` the frame turns with the agent's heading (+x of the tensor
    points along the heading).
    """
    own = np.asarray(getattr(own_belief, "cells", own_belief))
    obst = np.asarray(getattr(merged_obstacles, "cells", merged_obstacles))
    if obst.dtype != bool:
        obst = obst == OBSTACLE
    height, width = own.shape
    side = max(width, height) * resolution
    pixel = side / size
    x0, y0 = float(self_pose[0]), float(self_pose[1])
    theta = float(self_pose[2]) if rotate and len(self_pose) > 2 else 0.0
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    offs = (np.arange(size) + 0.5 - size / 2) * pixel
    u, v = np.meshgrid(offs, offs)            # u along columns, v along rows
    wx = x0 + cos_t * u - sin_t * v
    wy = y0 + sin_t * u + cos_t * v
    col = np.floor(wx / resolution).astype(np.int64)
    row = np.floor(wy / resolution).astype(np.int64)
    inside = (col >= 0) & (col < width) & (row >= 0) & (row < height)
    rc, cc = np.where(inside, row, 0), np.where(inside, col, 0)

    out = np.zeros((size, size, 3), dtype=np.float32)
    out[..., 0] = inside & (own[rc, cc] != UNKNOWN)
    out[..., 1] = inside & obst[rc, cc]
    taken = np.zeros((size, size), dtype=bool)
    for pose in [self_pose, *teammate_poses]:
        r, c = _blip_pixel(float(pose[0]) - x0, float(pose[1]) - y0, pixel, size, cos_t, sin_t)
        if taken[r, c]:
            r, c = _nearest_free(taken, r, c)
        taken[r, c] = True
    out[..., 2] = taken
    return out


class _BlobWriter:
    def __init__(self, fh):
        self.fh = fh
        self.offset = 0

    def put(self, array: np.ndarray) -> dict:
        data = np.ascontiguousarray(array)
        raw = data.tobytes()
        self.fh.write(raw)
        ref = {"offset": self.offset, "length": len(raw), "shape": list(data.shape), "dtype": data.dtype.str}
        self.offset += len(raw)
        return ref


def read_blob(blob_path, ref: dict) -> np.ndarray:
    with open(blob_path, "rb") as fh:
        fh.seek(int(ref["offset"]))
        raw = fh.read(int(ref["length"]))
    return np.frombuffer(raw, dtype=np.dtype(ref["dtype"])).reshape(ref["shape"])


def _as_logs(logs):
    for item in logs:
        if isinstance(item, EpisodeLog):
            yield item
        else:
            yield EpisodeLog.load(item)


def export_dataset(logs, path, rotate: bool = False) -> int:
    """Write one decision tuple per (decision, agent) of every log; returns the record count.

    Goals of agents that had nothing left to explore (logged as null) produce
    no record. The bi-level action is recomputed with the goal encoder from the
    logged goal, and the record carries both.
    """
    path = Path(path)
    blob_path = path.with_name(path.name + ".bin")
    count = 0
    with open(path, "w", encoding="utf-8") as jf, open(blob_path, "wb") as bf:
        blobs = _BlobWriter(bf)
        header = {"type": "header", "dataset_version": DATASET_VERSION, "blob_file": blob_path.name,
                  "tensor_size": TENSOR_SIZE, "rotate": bool(rotate)}
        jf.write(json.dumps(header, separators=(",", ":")) + "\n")
        for episode, log in enumerate(_as_logs(logs)):
            grid = log.header["grid"]
            res = float(grid["resolution"])
            patch_grid = PatchGrid.for_map(grid["width"] * res, grid["height"] * res)
            records = []

            def on_decision(snap, episode=episode, records=records):
                gt_ref = None
                for i, goal in enumerate(snap.goals):
                    if goal is None:
                        continue
                    action = encode_goal(goal, patch_grid)
                    if gt_ref is None:
                        gt_ref = blobs.put(snap.truth.cells)
                    teammates = [snap.poses[j][:3] for j in range(len(snap.poses)) if j != i]
                    centric = encode_agent_centric(snap.beliefs[i], snap.merged[i] == OBSTACLE,
                                                   snap.poses[i][:3], teammates, res, rotate=rotate)
                    views = np.zeros_like(snap.beliefs[i])
                    for entry in snap.views[i].values():
                        np.maximum(views, entry.belief, out=views)
                    records.append({
                        "type": "record",
                        "episode": episode,
                        "seed": log.header["config"]["seed"],
                        "decision": snap.index,
                        "agent": i,
                        "s_i": list(snap.poses[i]),
                        "goal": list(goal),
                        "decoded_goal": list(decode_goal(action, patch_grid)),
                        "a_1": action.g,
                        "a_2": [action.x, action.y],
                        "map_i": blobs.put(snap.beliefs[i]),
                        "map_minus_i": blobs.put(views),
                        "map_gt": gt_ref,
                        "agent_centric": blobs.put(centric.astype(np.uint8)),
                    })

            replay(log, on_decision=on_decision)
            for rec in records:
                jf.write(json.dumps(rec, separators=(",", ":"), allow_nan=False) + "\n")
            count += len(records)
    return count


def load_dataset(path):
    """(header, records) of an exported dataset; arrays stay as blob references."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    return header, [json.loads(line) for line in lines[1:] if line.strip()]
