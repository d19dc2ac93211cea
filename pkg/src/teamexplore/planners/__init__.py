"""Frontier planners producing world-frame exploration goals, and the goal codec."""

from ..errors import ConfigurationError
from .codec import BiLevelAction, PatchGrid, decode_goal, encode_goal, quantize_goal
from .common import PlannerContext, info_gain, info_gain_many, minmax_normalize, utility
from .mmpf import (
    FrontierGroup,
    MmpfConfig,
    MmpfPlanner,
    bfs_distance_map,
    cluster_frontiers,
    mmpf_plan,
    potential_field,
)
from .rrt import RrtConfig, RrtPlanner, rrt_plan
from .voronoi import VoronoiConfig, VoronoiPlanner, voronoi_partition, voronoi_plan

PLANNERS = {
    "rrt": (RrtPlanner, RrtConfig),
    "mmpf": (MmpfPlanner, MmpfConfig),
    "voronoi": (VoronoiPlanner, VoronoiConfig),
}


def planner_config(name: str, **params):
    try:
        _, cfg_cls = PLANNERS[name]
    except KeyError:
        raise ConfigurationError(f"unknown planner {name!r}; choose from {sorted(PLANNERS)}") from None
    return cfg_cls(**params)


def make_planner(name: str, cfg=None):
    """A fresh planner instance (planners may keep per-episode state)."""
    if name not in PLANNERS:
        raise ConfigurationError(f"unknown planner {name!r}; choose from {sorted(PLANNERS)}")
    planner_cls, cfg_cls = PLANNERS[name]
    return planner_cls(cfg if cfg is not None else cfg_cls())


__all__ = [
    "BiLevelAction",
    "FrontierGroup",
    "MmpfConfig",
    "MmpfPlanner",
    "PLANNERS",
    "PatchGrid",
    "PlannerContext",
    "RrtConfig",
    "RrtPlanner",
    "VoronoiConfig",
    "VoronoiPlanner",
    "bfs_distance_map",
    "cluster_frontiers",
    "decode_goal",
    "encode_goal",
    "info_gain",
    "info_gain_many",
    "make_planner",
    "minmax_normalize",
    "mmpf_plan",
    "planner_config",
    "potential_field",
    "quantize_goal",
    "rrt_plan",
    "utility",
    "voronoi_partition",
    "voronoi_plan",
]
