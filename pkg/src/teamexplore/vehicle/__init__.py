"""Ackermann kinematics and DWA local navigation."""

from .dwa import (
    PENALTY_FLOOR,
    DwaConfig,
    control_lattice,
    dwa_scores,
    dwa_select,
    dwa_select_mask,
    footprint_collides,
    nearest_obstacle_distance,
    obstacle_penalty,
    select_from_costs,
)
from .kinematics import AgentState, ControlInput, VehicleParams, step_kinematics, wrap_angle

__all__ = [
    "AgentState",
    "ControlInput",
    "DwaConfig",
    "PENALTY_FLOOR",
    "VehicleParams",
    "control_lattice",
    "dwa_scores",
    "dwa_select",
    "dwa_select_mask",
    "footprint_collides",
    "nearest_obstacle_distance",
    "obstacle_penalty",
    "select_from_costs",
    "step_kinematics",
    "wrap_angle",
]
