"""Scenario descriptions and ground-truth construction."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from enum import Enum

from ..errors import ConfigurationError
from .generate import generate_maze, generate_random_obstacles
from .grid import OccupancyGrid
from .sensing import DEFAULT_ANGULAR_RESOLUTION


class ScenarioKind(str, Enum):
    MAZE = "maze"
    RANDOM_OBSTACLE = "random_obstacle"


# Per-scenario task parameters: decision budget, movement steps between
# decisions, lidar range (m), seconds per movement step.
TASK_PARAMETERS = {
    ScenarioKind.MAZE: dict(global_step_budget=30, local_steps_per_decision=20, lidar_range=10.0, dt=0.1),
    ScenarioKind.RANDOM_OBSTACLE: dict(global_step_budget=30, local_steps_per_decision=30, lidar_range=12.0, dt=0.1),
}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: ScenarioKind = ScenarioKind.MAZE
    side_length: float = 125.0
    resolution: float = 1.0
    global_step_budget: int = 30
    local_steps_per_decision: int = 20
    lidar_range: float = 10.0
    dt: float = 0.1
    completion_threshold: float = 0.95
    seed: int = 0
    angular_resolution: float = DEFAULT_ANGULAR_RESOLUTION
    # maze generator
    corridor_width: int = 18
    wall_thickness: int = 3
    braid: float = 0.5
    # random-obstacle generator
    density: float = 0.2
    # agents spawn inside a disc of this radius (m) around a random anchor;
    # 0 means anywhere in free space
    spawn_radius: float = 12.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        if self.global_step_budget < 0:
            raise ConfigurationError("global_step_budget must be >= 0")
        if self.local_steps_per_decision < 1:
            raise ConfigurationError("local_steps_per_decision must be >= 1")
        if not 0.0 < self.completion_threshold <= 1.0:
            raise ConfigurationError("completion_threshold must be in (0, 1]")
        if self.lidar_range < 0 or not self.dt > 0:
            raise ConfigurationError("lidar_range must be >= 0 and dt > 0")
        if self.spawn_radius < 0 or not math.isfinite(self.spawn_radius):
            raise ConfigurationError("spawn_radius must be a finite value >= 0")

    @classmethod
    def for_kind(cls, kind, **overrides) -> "ScenarioConfig":
        kind = ScenarioKind(kind)
        values = dict(TASK_PARAMETERS[kind])
        values.update(overrides)
        return cls(kind=kind, **values)

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        return cls(**data)


def build_world(scenario: ScenarioConfig) -> OccupancyGrid:
    if scenario.kind is ScenarioKind.MAZE:
        return generate_maze(
            scenario.seed,
            scenario.side_length,
            scenario.resolution,
            scenario.corridor_width,
            scenario.wall_thickness,
            scenario.braid,
        )
    return generate_random_obstacles(
        scenario.seed, scenario.side_length, scenario.resolution, scenario.density
    )
