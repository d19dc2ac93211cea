"""Per-agent reward accounting for one decision round."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class RewardConfig:
    R_s: float = 10.0
    R_c: float = 1.0
    # (success, explore, overlap, collision, time)
    weights: tuple = (1.0, 0.02, 0.02, 1.0, 0.1)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.R_s < 0 or self.R_c < 0:
            raise ConfigurationError("reward constants must be >= 0")
        if len(self.weights) != 5 or any(w < 0 for w in self.weights):
            raise ConfigurationError("reward weights must be five non-negative numbers")

    def to_dict(self):
        out = asdict(self)
        out["weights"] = list(self.weights)
        return out


@dataclass(frozen=True)
class StepReward:
    success: float
    explore: float
    overlap: float
    collision: float
    time: float
    combined: float = field(default=0.0)

    def to_dict(self) -> dict:
        return asdict(self)


def _combine(cfg: RewardConfig, parts) -> float:
    return float(sum(w * p for w, p in zip(cfg.weights, parts)))


def compute_step_rewards(prev_team_known, observed, collisions, cov_t: float,
                         success_now: bool, cfg: RewardConfig) -> list[StepReward]:
    """Rewards for every agent after one decision round.

    ``prev_team_known`` is the team's known-cell mask (or an OccupancyGrid)
    before the round; ``observed[i]`` holds the flat indices agent ``i``
    observed during the round (a ScanResult is accepted too).

    explore counts cells agent i observed that the team did not know before
    (cells revealed by several agents at once count for each of them); overlap
    is minus the number of cells agent i observed that some teammate also
    observed this round.
    """
    if hasattr(prev_team_known, "known_mask"):
        known = prev_team_known.known_mask().reshape(-1)
    else:
        known = np.asarray(prev_team_known, dtype=bool).reshape(-1)
    sets = []
    for obs in observed:
        if hasattr(obs, "observed_cells"):
            if obs.width * obs.height != known.size:
                raise DomainError("scan geometry does not match the team map")
            obs = obs.observed_cells
        obs = np.unique(np.asarray(obs, dtype=np.int64))
        if obs.size and (obs.min() < 0 or obs.max() >= known.size):
            raise DomainError("observed cell index outside the team map")
        sets.append(obs)
    if len(collisions) != len(sets):
        raise DomainError("need one collision flag per agent")

    counts = np.zeros(known.size, dtype=np.int64)
    for obs in sets:
        counts[obs] += 1

    out = []
    for obs, hit in zip(sets, collisions):
        explore = float(np.count_nonzero(~known[obs]))
        # cells this agent saw that at least one other agent saw as well
        overlap = -float(np.count_nonzero(counts[obs] > 1))
        parts = (
            cfg.R_s if success_now else 0.0,
            explore,
            overlap,
            -cfg.R_c if hit else 0.0,
            -float(cov_t),
        )
        out.append(StepReward(*parts, combined=_combine(cfg, parts)))
    return out
