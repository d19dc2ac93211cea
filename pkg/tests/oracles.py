"""Slow, independent reference implementations used only by the tests.

None of these call into the package's compiled kernels; they are written
from the definitions so a shared bug cannot hide.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

UNKNOWN, FREE, OBSTACLE = 0, 1, 2


# --- ray casting -------------------------------------------------------------

def segment_cell_entries(x0, y0, x1, y1, width, height):
    """Liang-Barsky clip of a segment against every cell square of the grid.

    Returns ``[(t_enter, row, col)]`` for cells whose closed square the segment
    touches, ``t`` measured as a fraction of the segment.
    """
    dx, dy = x1 - x0, y1 - y0
    out = []
    c_lo, c_hi = max(int(math.floor(min(x0, x1))) - 1, 0), min(int(math.floor(max(x0, x1))) + 1, width - 1)
    r_lo, r_hi = max(int(math.floor(min(y0, y1))) - 1, 0), min(int(math.floor(max(y0, y1))) + 1, height - 1)
    for row in range(r_lo, r_hi + 1):
        for col in range(c_lo, c_hi + 1):
            t0, t1 = 0.0, 1.0
            ok = True
            for p, q in ((-dx, x0 - col), (dx, col + 1 - x0), (-dy, y0 - row), (dy, row + 1 - y0)):
                if p == 0:
                    if q < 0:
                        ok = False
                        break
                    continue
                t = q / p
                if p < 0:
                    t0 = max(t0, t)
                else:
                    t1 = min(t1, t)
            if ok and t0 <= t1:
                out.append((t0, row, col))
    out.sort()
    return out


def brute_force_scan(cells, res, x, y, heading, max_range, n_beams, tie=1e-9):
    """Visibility by clipping each beam segment against all cells.

    Cells are visited in order of entry. Cells entered at the same parameter
    (a corner crossing) form a group: the two side cells are examined first and
    stop the beam if either is an obstacle, then the diagonal cell.
    """
    height, width = cells.shape
    ox, oy, reach = x / res, y / res, max_range / res
    start = (int(math.floor(oy)), int(math.floor(ox)))
    freed, hits = {start[0] * width + start[1]}, set()
    for k in range(n_beams):
        a = heading + 2.0 * math.pi * k / n_beams
        ex, ey = ox + reach * math.cos(a), oy + reach * math.sin(a)
        entries = [e for e in segment_cell_entries(ox, oy, ex, ey, width, height) if (e[1], e[2]) != start]
        prev = start
        i = 0
        while i < len(entries):
            t = entries[i][0]
            group = []
            while i < len(entries) and (entries[i][0] - t) * reach <= tie:
                group.append(entries[i][1:])
                i += 1
            sides = [c for c in group if abs(c[0] - prev[0]) + abs(c[1] - prev[1]) == 1]
            diag = [c for c in group if c not in sides]
            blocked = [c for c in sides if cells[c] == OBSTACLE]
            if blocked:
                hits.update(r * width + c for r, c in blocked)
                break
            freed.update(r * width + c for r, c in sides)
            stop = False
            for c in diag:
                if cells[c] == OBSTACLE:
                    hits.add(c[0] * width + c[1])
                    stop = True
                else:
                    freed.add(c[0] * width + c[1])
                prev = c
            if stop:
                break
            if not diag and sides:
                prev = sides[0]
    return freed, hits


# --- map analysis ------------------------------------------------------------

def brute_frontiers(cells, connectivity=4):
    height, width = cells.shape
    nbrs = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if connectivity == 8:
        nbrs += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    out = set()
    for r in range(height):
        for c in range(width):
            if cells[r, c] != FREE:
                continue
            for dr, dc in nbrs:
                rr, cc = r + dr, c + dc
                if 0 <= rr < height and 0 <= cc < width and cells[rr, cc] == UNKNOWN:
                    out.add(r * width + c)
                    break
    return out


def brute_voronoi(cells, res, agents):
    height, width = cells.shape
    labels = np.full((height, width), -1, dtype=np.int64)
    for r in range(height):
        for c in range(width):
            if cells[r, c] != FREE:
                continue
            cx, cy = (c + 0.5) * res, (r + 0.5) * res
            best, owner = math.inf, -1
            for i, (ax, ay) in enumerate(agents):
                dx, dy = cx - ax, cy - ay
                d = dx * dx + dy * dy
                if d < best:
                    best, owner = d, i
            labels[r, c] = owner
    return labels


def brute_info_gain(cells, res, x, y, radius):
    height, width = cells.shape
    n = 0
    for r in range(height):
        for c in range(width):
            if cells[r, c] == UNKNOWN:
                dx, dy = (c + 0.5) * res - x, (r + 0.5) * res - y
                if dx * dx + dy * dy <= radius * radius:
                    n += 1
    return n


def brute_bfs(passable, source, connectivity=4):
    height, width = passable.shape
    moves = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if connectivity == 8:
        moves += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    dist = {source: 0}
    queue = deque([source])
    while queue:
        r, c = queue.popleft()
        for dr, dc in moves:
            nxt = (r + dr, c + dc)
            if 0 <= nxt[0] < height and 0 <= nxt[1] < width and passable[nxt] and nxt not in dist:
                dist[nxt] = dist[(r, c)] + 1
                queue.append(nxt)
    return dist


def union_find_groups(cells, width, radius):
    """Frontier groups by pairwise Chebyshev linkage, as sorted tuples."""
    cells = sorted(cells)
    parent = list(range(len(cells)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, a in enumerate(cells):
        ra, ca = divmod(a, width)
        for j in range(i + 1, len(cells)):
            rb, cb = divmod(cells[j], width)
            if max(abs(ra - rb), abs(ca - cb)) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i, c in enumerate(cells):
        groups.setdefault(find(i), []).append(c)
    return sorted(tuple(sorted(g)) for g in groups.values())


# --- vehicle -----------------------------------------------------------------

def disc_hits_obstacle(obstacles, res, x, y, r):
    height, width = obstacles.shape
    if x - r < 0 or y - r < 0 or x + r > width * res or y + r > height * res:
        return True
    # a padded bounding box around the disc; cells outside it cannot be closer than r
    c0, r0 = max(int((x - r) / res) - 1, 0), max(int((y - r) / res) - 1, 0)
    window = obstacles[r0:int((y + r) / res) + 2, c0:int((x + r) / res) + 2]
    for row, col in zip(*np.nonzero(window)):
        row, col = row + r0, col + c0
        qx = min(max(x, col * res), (col + 1) * res)
        qy = min(max(y, row * res), (row + 1) * res)
        if (x - qx) ** 2 + (y - qy) ** 2 < r * r:
            return True
    return False


def nearest_center_distance(obstacles, res, x, y):
    best = math.inf
    for row, col in zip(*np.nonzero(obstacles)):
        dx = x - (col + 0.5) * res
        dy = y - (row + 0.5) * res
        best = min(best, math.sqrt(dx * dx + dy * dy))
    return best


def dwa_reference(obstacles, res, state, goal, cfg, params, step):
    """Exhaustive lattice scoring; ``step(state, a, phi)`` advances one Euler step.

    Returns ``(costs dict keyed by (a, phi), chosen (a, phi) or None)``.
    """
    na, ns = cfg.accel_samples, cfg.steer_samples
    a_vals = [-params.a_max + 2.0 * params.a_max * i / (na - 1) for i in range(na)]
    phi_vals = [-params.phi_max + 2.0 * params.phi_max * j / (ns - 1) for j in range(ns)]
    costs = {}
    for a in a_vals:
        for phi in phi_vals:
            s = state
            ok = True
            for _ in range(cfg.horizon_steps):
                s = step(s, a, phi)
                if disc_hits_obstacle(obstacles, res, s.x, s.y, params.footprint_radius):
                    ok = False
                    break
            if not ok:
                costs[(a, phi)] = math.inf
                continue
            # squares by multiplication: libm pow(x, 2) can differ by an ulp
            gx, gy = s.x - goal[0], s.y - goal[1]
            lg = math.sqrt(gx * gx + gy * gy)
            lo = nearest_center_distance(obstacles, res, s.x, s.y)
            if lo >= cfg.C:
                op = 0.0
            elif lo <= 0:
                op = -1e6
            else:
                op = max(math.log(lo / cfg.C), -1e6)
            costs[(a, phi)] = lg - cfg.alpha * op
    feasible = [(c, abs(phi), abs(a), phi, a) for (a, phi), c in costs.items() if c < math.inf]
    if not feasible:
        return costs, None
    best = min(feasible)
    return costs, (best[4], best[3])
