"""Dynamic Window Approach over a sampled (acceleration, steering) lattice.

Each lattice control is held constant for ``horizon_steps`` Euler steps. A
rollout is infeasible if the vehicle footprint overlaps a known obstacle cell
(or leaves the map) at any step. Feasible rollouts are scored at their
endpoint by ``L_g - alpha * O_p`` (lower is better), where ``L_g`` is the
distance to the goal and ``O_p <= 0`` is the obstacle penalty.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numba
import numpy as np

from ..errors import ConfigurationError, DomainError
from ..world.grid import OBSTACLE, OccupancyGrid
from .kinematics import AgentState, ControlInput, VehicleParams, euler_step

PENALTY_FLOOR = -1e6


@dataclass(frozen=True)
class DwaConfig:
    alpha: float = 1.0
    C: float = 2.0
    accel_samples: int = 7
    steer_samples: int = 11
    horizon_steps: int = 5
    dt: float = 0.1

    def __post_init__(self):
        if not self.alpha > 0 or not self.C > 0:
            raise ConfigurationError("DWA alpha and C must be positive")
        if self.accel_samples < 3 or self.steer_samples < 3:
            raise ConfigurationError("DWA lattice needs at least 3 samples per axis")
        if self.horizon_steps < 1 or not self.dt > 0:
            raise ConfigurationError("DWA horizon_steps must be >= 1 and dt > 0")

    def to_dict(self):
        return asdict(self)


def obstacle_penalty(L_o: float, C: float) -> float:
    """0 when ``L_o >= C``, else ``ln(L_o / C)`` floored at PENALTY_FLOOR."""
    if L_o >= C:
        return 0.0
    ratio = L_o / C
    if ratio <= 0.0:
        # also catches subnormal L_o whose ratio underflows
        return PENALTY_FLOOR
    return max(math.log(ratio), PENALTY_FLOOR)


def nearest_obstacle_distance(belief: OccupancyGrid, point) -> float:
    """Euclidean distance from ``point`` to the nearest OBSTACLE cell center (inf if none)."""
    x, y = float(point[0]), float(point[1])
    if not belief.contains(x, y):
        raise DomainError(f"point ({x}, {y}) lies outside the grid")
    rows, cols = np.nonzero(belief.cells == OBSTACLE)
    if rows.size == 0:
        return math.inf
    res = belief.resolution
    dx = x - (cols + 0.5) * res
    dy = y - (rows + 0.5) * res
    return float(np.sqrt(dx * dx + dy * dy).min())


def control_lattice(cfg: DwaConfig, params: VehicleParams) -> tuple[np.ndarray, np.ndarray]:
    """Evenly spaced accelerations and steering angles, endpoints included."""
    na, ns = cfg.accel_samples, cfg.steer_samples
    a_vals = np.array([-params.a_max + 2.0 * params.a_max * i / (na - 1) for i in range(na)])
    phi_vals = np.array([-params.phi_max + 2.0 * params.phi_max * j / (ns - 1) for j in range(ns)])
    return a_vals, phi_vals


@numba.njit(cache=True)
def _footprint_hits(obst, res, x, y, r):
    height, width = obst.shape
    if x - r < 0.0 or y - r < 0.0 or x + r > width * res or y + r > height * res:
        return True
    c_lo = int(math.floor((x - r) / res))
    c_hi = min(int(math.floor((x + r) / res)), width - 1)
    r_lo = int(math.floor((y - r) / res))
    r_hi = min(int(math.floor((y + r) / res)), height - 1)
    r2 = r * r
    for row in range(r_lo, r_hi + 1):
        for col in range(c_lo, c_hi + 1):
            if obst[row, col]:
                qx = min(max(x, col * res), (col + 1) * res)
                qy = min(max(y, row * res), (row + 1) * res)
                ddx = x - qx
                ddy = y - qy
                if ddx * ddx + ddy * ddy < r2:
                    return True
    return False


@numba.njit(cache=True)
def _clearance(obst, res, x, y, cap):
    """Distance to the nearest obstacle cell center, exact when below ``cap``, else ``cap``."""
    height, width = obst.shape
    span = int(math.ceil(cap / res)) + 1
    c0 = int(math.floor(x / res))
    r0 = int(math.floor(y / res))
    best = cap
    for row in range(max(r0 - span, 0), min(r0 + span, height - 1) + 1):
        for col in range(max(c0 - span, 0), min(c0 + span, width - 1) + 1):
            if obst[row, col]:
                dx = x - (col + 0.5) * res
                dy = y - (row + 0.5) * res
                d = math.sqrt(dx * dx + dy * dy)
                if d < best:
                    best = d
    return best


@numba.njit(cache=True)
def _rollout_costs(obst, res, x0, y0, th0, v0, gx, gy, a_vals, phi_vals,
                   dt, L, v_max, radius, horizon, alpha, C, floor):
    na = a_vals.shape[0]
    ns = phi_vals.shape[0]
    costs = np.empty(na * ns)
    ends = np.empty((na * ns, 4))
    for i in range(na):
        a = a_vals[i]
        for j in range(ns):
            phi = phi_vals[j]
            x = x0
            y = y0
            th = th0
            v = v0
            ok = True
            for _ in range(horizon):
                x, y, th, v = euler_step(x, y, th, v, a, phi, dt, L, v_max)
                if _footprint_hits(obst, res, x, y, radius):
                    ok = False
                    break
            k = i * ns + j
            ends[k, 0] = x
            ends[k, 1] = y
            ends[k, 2] = th
            ends[k, 3] = v
            if not ok:
                costs[k] = np.inf
                continue
            dx = x - gx
            dy = y - gy
            lg = math.sqrt(dx * dx + dy * dy)
            lo = _clearance(obst, res, x, y, C)
            if lo >= C:
                op = 0.0
            elif lo <= 0.0:
                op = floor
            else:
                op = max(math.log(lo / C), floor)
            costs[k] = lg - alpha * op
    return costs, ends


def footprint_collides(obstacles: np.ndarray, resolution: float, x: float, y: float, radius: float) -> bool:
    """True if a disc footprint overlaps an obstacle cell or leaves the map."""
    return bool(_footprint_hits(obstacles, float(resolution), float(x), float(y), float(radius)))


def select_from_costs(costs: np.ndarray, a_vals: np.ndarray, phi_vals: np.ndarray) -> int | None:
    """Index of the best control; ties by |phi|, |a|, then phi, a. None if all infeasible."""
    feasible = np.isfinite(costs)
    if not feasible.any():
        return None
    best = costs[feasible].min()
    cand = np.flatnonzero(costs == best)
    ns = phi_vals.size
    a = a_vals[cand // ns]
    phi = phi_vals[cand % ns]
    order = np.lexsort((a, phi, np.abs(a), np.abs(phi)))
    return int(cand[order[0]])


def brake(state: AgentState, params: VehicleParams) -> ControlInput:
    return ControlInput(-params.a_max * float(np.sign(state.v)), 0.0)


def dwa_scores(obstacles, resolution, state: AgentState, goal, cfg: DwaConfig, params: VehicleParams):
    """Per-lattice-control costs (inf for infeasible) and rollout end states."""
    a_vals, phi_vals = control_lattice(cfg, params)
    costs, ends = _rollout_costs(
        obstacles, float(resolution), float(state.x), float(state.y), float(state.theta),
        float(state.v), float(goal[0]), float(goal[1]), a_vals, phi_vals, float(cfg.dt),
        float(params.L), float(params.v_max), float(params.footprint_radius),
        int(cfg.horizon_steps), float(cfg.alpha), float(cfg.C), PENALTY_FLOOR,
    )
    return costs, ends, a_vals, phi_vals


def dwa_select_mask(obstacles: np.ndarray, resolution: float, state: AgentState, goal,
                    cfg: DwaConfig, params: VehicleParams) -> ControlInput:
    costs, _, a_vals, phi_vals = dwa_scores(obstacles, resolution, state, goal, cfg, params)
    k = select_from_costs(costs, a_vals, phi_vals)
    if k is None:
        return brake(state, params)
    ns = phi_vals.size
    return ControlInput(float(a_vals[k // ns]), float(phi_vals[k % ns]))


def dwa_select(state: AgentState, goal, belief: OccupancyGrid, cfg: DwaConfig,
               params: VehicleParams) -> ControlInput:
    """Pick the lattice control whose rollout endpoint minimises ``L_g - alpha * O_p``.

    Falls back to full braking with zero steering when every rollout collides.
    """
    if not belief.contains(float(goal[0]), float(goal[1])):
        raise DomainError(f"goal {tuple(goal)} lies outside the grid")
    obstacles = belief.cells == OBSTACLE
    return dwa_select_mask(obstacles, belief.resolution, state, goal, cfg, params)
