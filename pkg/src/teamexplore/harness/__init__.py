"""Experiment harness: config files, presets, batch runs, dataset export and plots."""

from .config import CONFIG_VERSION, Cell, ExperimentConfig, ScenarioSet, load_config, parse_config
from .dataset import encode_agent_centric, export_dataset, load_dataset, read_blob
from .plots import coverage_band, coverage_svg, emit_plots, trajectory_svg
from .presets import PRESETS, load_preset, preset_text
from .runner import WORKERS_ENV, ExperimentResult, derive_seed, resolve_workers, run_experiment

__all__ = [
    "CONFIG_VERSION",
    "Cell",
    "ExperimentConfig",
    "ExperimentResult",
    "PRESETS",
    "ScenarioSet",
    "WORKERS_ENV",
    "coverage_band",
    "coverage_svg",
    "derive_seed",
    "emit_plots",
    "encode_agent_centric",
    "export_dataset",
    "load_config",
    "load_dataset",
    "load_preset",
    "parse_config",
    "preset_text",
    "read_blob",
    "resolve_workers",
    "run_experiment",
    "trajectory_svg",
]
