"""Inter-agent message exchange with topology limits and random dropout."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError


class Topology(str, Enum):
    FULL = "full"
    K_NEAREST = "k_nearest"


@dataclass(frozen=True)
class CommsConfig:
    topology: Topology = Topology.FULL
    k: int = 2
    dropout_p: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if not 0.0 <= self.dropout_p <= 1.0:
            raise ConfigurationError(f"dropout_p must be in [0, 1], got {self.dropout_p}")
        if self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")

    def to_dict(self) -> dict:
        return {"topology": self.topology.value, "k": self.k, "dropout_p": self.dropout_p, "seed": self.seed}


@dataclass(frozen=True)
class ViewEntry:
    """What a receiver last heard from one sender."""

    belief: np.ndarray
    pose: tuple
    stamp: int


def build_topology(positions, cfg: CommsConfig) -> list[list[int]]:
    """``adj[i]`` lists the agents that ``i`` receives from.

    K-nearest links each agent to its ``k`` closest others (directed, k capped
    at n - 1), breaking distance ties by lower index.
    """
    pts = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    n = pts.shape[0]
    if cfg.topology is Topology.FULL:
        return [[j for j in range(n) if j != i] for i in range(n)]
    k = min(cfg.k, n - 1)
    adj = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        d2 = [float(((pts[j] - pts[i]) ** 2).sum()) for j in others]
        order = sorted(range(len(others)), key=lambda m: (d2[m], others[m]))
        adj.append(sorted(others[m] for m in order[:k]))
    return adj


def initial_views(beliefs, poses) -> list[dict[int, ViewEntry]]:
    """Every agent starts knowing every teammate's step-0 state."""
    n = len(beliefs)
    return [
        {j: ViewEntry(beliefs[j].copy(), tuple(poses[j]), 0) for j in range(n) if j != i}
        for i in range(n)
    ]


def exchange(beliefs, poses, views, cfg: CommsConfig, step: int, rng: np.random.Generator):
    """One round of messages along the current topology.

    Each directed message (sender -> receiver) is delivered with probability
    ``1 - dropout_p``; a delivered message replaces the receiver's cache entry
    for that sender with the sender's current belief and pose stamped ``step``.
    One uniform draw is consumed per message, in (receiver, sender) order, so
    the delivery pattern is fixed by the stream state.

    Returns ``(new_views, deliveries)`` where deliveries is a list of
    ``(receiver, sender, delivered)``.
    """
    adj = build_topology([p[:2] for p in poses], cfg)
    new_views = [dict(v) for v in views]
    deliveries = []
    for receiver, senders in enumerate(adj):
        for sender in senders:
            delivered = bool(rng.random() >= cfg.dropout_p)
            deliveries.append((receiver, sender, delivered))
            if delivered:
                new_views[receiver][sender] = ViewEntry(
                    beliefs[sender].copy(), tuple(poses[sender]), int(step)
                )
    return new_views, deliveries


def merged_view(own: np.ndarray, view: dict[int, ViewEntry]) -> np.ndarray:
    """Lattice join of the agent's own belief with everything it last heard."""
    out = own.copy()
    for entry in view.values():
        np.maximum(out, entry.belief, out=out)
    return out
