"""Deterministic multi-agent exploration simulator and planning baselines."""

__version__ = "0.1.0"
