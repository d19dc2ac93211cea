"""Shipped experiment presets, written in the same YAML schema a user would write."""

from __future__ import annotations

import dataclasses

from ..errors import ConfigurationError
from .config import ExperimentConfig, parse_config

PRESETS = {
    "baseline-comparison": """\
version: 1
name: baseline-comparison
episodes: 50
scenarios:
  - name: maze
    kind: maze
    count: 20
planners: [rrt, mmpf, voronoi]
team_sizes: [3]
""",
    "dropout-sweep": """\
version: 1
name: dropout-sweep
episodes: 50
scenarios:
  - name: maze
    kind: maze
    count: 50
planners: [voronoi]
team_sizes: [3]
comms:
  topology: full
  dropout: [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
""",
    "scalability-sweep": """\
version: 1
name: scalability-sweep
episodes: 50
scenarios:
  - name: maze
    kind: maze
    count: 50
planners: [rrt]
team_sizes: [2, 3, 4, 5, 6]
comms:
  topology: k_nearest
  k: 2
""",
    "multi-maze": """\
version: 1
name: multi-maze
episodes: 50
scenarios:
  - name: train
    kind: maze
    count: 70
    seed_start: 0
  - name: test
    kind: maze
    count: 10
    seed_start: 70
planners: [rrt, mmpf, voronoi]
team_sizes: [3]
""",
}


def preset_text(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def load_preset(name: str, episodes: int | None = None, master_seed: int | None = None,
                **overrides) -> ExperimentConfig:
    cfg = parse_config(preset_text(name))
    changes = dict(overrides)
    if episodes is not None:
        changes["episodes"] = episodes
    if master_seed is not None:
        changes["master_seed"] = master_seed
    if changes:
        cfg = dataclasses.replace(cfg, **changes)
    return cfg
