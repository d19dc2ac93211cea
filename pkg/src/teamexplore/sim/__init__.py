"""Episode engine, reward accounting and episode logs."""

from .engine import EpisodeConfig, Status, check_termination, run_episode, sample_spawns, stream
from .log import SCHEMA_VERSION, EpisodeLog
from .navigation import Navigator
from .replay import DecisionSnapshot, ReplayResult, replay
from .rewards import RewardConfig, StepReward, compute_step_rewards

__all__ = [
    "DecisionSnapshot",
    "EpisodeConfig",
    "EpisodeLog",
    "Navigator",
    "ReplayResult",
    "RewardConfig",
    "SCHEMA_VERSION",
    "Status",
    "StepReward",
    "check_termination",
    "compute_step_rewards",
    "replay",
    "run_episode",
    "sample_spawns",
    "stream",
]
