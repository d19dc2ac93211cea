"""Ground truth, sensing, belief maintenance and coverage accounting."""

from .analysis import (
    detect_frontiers,
    exploration_ratio,
    frontier_mask,
    merge_maps,
    reachable_free_cells,
    reachable_mask,
)
from .generate import generate_maze, generate_random_obstacles
from .grid import FREE, OBSTACLE, UNKNOWN, CellState, OccupancyGrid
from .scenario import TASK_PARAMETERS, ScenarioConfig, ScenarioKind, build_world
from .sensing import ScanResult, apply_scan, integrate_scan, raycast_scan

__all__ = [
    "CellState",
    "FREE",
    "OBSTACLE",
    "UNKNOWN",
    "OccupancyGrid",
    "ScanResult",
    "ScenarioConfig",
    "ScenarioKind",
    "TASK_PARAMETERS",
    "apply_scan",
    "build_world",
    "detect_frontiers",
    "exploration_ratio",
    "frontier_mask",
    "generate_maze",
    "generate_random_obstacles",
    "integrate_scan",
    "merge_maps",
    "raycast_scan",
    "reachable_free_cells",
    "reachable_mask",
]
