"""Seeded batch execution of an experiment matrix.

Every episode's seed is a hash of (master seed, cell key, episode index), so a
result never depends on which worker ran it or in what order. Workers only
compute; the parent process writes every file, in matrix order.
"""

from __future__ import annotations

import hashlib
import json
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import ConfigurationError
from ..metrics import aggregate, episode_metrics, markdown_table, metrics_csv
from ..sim import EpisodeConfig, run_episode
from .config import ExperimentConfig

WORKERS_ENV = "TEAMEXPLORE_WORKERS"
MANIFEST_VERSION = 1


def derive_seed(master_seed: int, cell_key: str, index: int) -> int:
    """63-bit episode seed from sha256 of ``master:cell:index``."""
    digest = hashlib.sha256(f"{int(master_seed)}:{cell_key}:{int(index)}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def resolve_workers(requested: int | None = None) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env is not None and env.strip():
        try:
            n = int(env)
        except ValueError:
            raise ConfigurationError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigurationError(f"{WORKERS_ENV} must be >= 1, got {n}")
        return n
    if requested is not None:
        return max(1, int(requested))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class EpisodeTask:
    cell_index: int
    index: int
    config: EpisodeConfig


@dataclass
class EpisodeOutcome:
    cell_index: int
    index: int
    log_text: str | None = None
    metrics: object = None
    status: str | None = None
    error: str | None = None


def run_task(task: EpisodeTask) -> EpisodeOutcome:
    try:
        log = run_episode(task.config)
        return EpisodeOutcome(task.cell_index, task.index, log.to_jsonl(),
                              episode_metrics(log), log.summary["status"])
    except Exception as exc:  # a failed episode marks its cell failed, the run goes on
        detail = "".join(traceback.format_exception_only(type(exc), exc)).strip()
        return EpisodeOutcome(task.cell_index, task.index, error=detail)


def _outcomes(tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield run_task(t)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(run_task, tasks, chunksize=1)


@dataclass
class ExperimentResult:
    out_dir: Path
    manifest: dict
    rows: dict = field(default_factory=dict)       # cell key -> AggregateRow
    failed: list = field(default_factory=list)     # cell keys with at least one failed episode

    @property
    def ok(self) -> bool:
        return not self.failed


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _dependency_versions() -> dict:
    import numba
    import scipy
    import yaml
    return {"numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__, "pyyaml": yaml.__version__}


def run_experiment(cfg: ExperimentConfig, out_dir=None, workers: int | None = None,
                   progress=None) -> ExperimentResult:
    """Run every (cell, episode) of ``cfg`` and write the result directory.

    Layout: ``episodes.csv``, ``summary.md``, ``logs/<cell>/epNNNN.jsonl`` and
    ``manifest.json`` (normalized config, versions, per-cell status, sha256
    of every written file).
    """
    out = Path(out_dir if out_dir is not None else (cfg.output or Path("results") / cfg.name))
    n_workers = resolve_workers(workers if workers is not None else cfg.workers)
    cells = cfg.cells()
    tasks = []
    for ci, cell in enumerate(cells):
        for i in range(cfg.episodes):
            seed = derive_seed(cfg.master_seed, cell.key, i)
            tasks.append(EpisodeTask(ci, i, cfg.episode_config(cell, i, seed)))

    out.mkdir(parents=True, exist_ok=True)
    written = []
    per_cell = [[] for _ in cells]
    extras = [[] for _ in cells]
    errors = [[] for _ in cells]
    for done, outcome in enumerate(_outcomes(tasks, n_workers), start=1):
        cell = cells[outcome.cell_index]
        task = tasks[done - 1]
        if outcome.error is not None:
            errors[outcome.cell_index].append({"episode": outcome.index, "error": outcome.error})
        else:
            rel = Path("logs") / cell.slug / f"ep{outcome.index:04d}.jsonl"
            (out / rel).parent.mkdir(parents=True, exist_ok=True)
            (out / rel).write_text(outcome.log_text, encoding="utf-8")
            written.append(rel)
            per_cell[outcome.cell_index].append(outcome.metrics)
            extras[outcome.cell_index].append({
                "cell": cell.key,
                "scenario": cell.scenario_set.name,
                "planner": cell.planner,
                "dropout_p": cell.dropout_p,
                "episode": outcome.index,
                "map_seed": task.config.scenario.seed,
                "status": outcome.status,
                "log": rel.as_posix(),
            })
        if progress is not None:
            progress(done, len(tasks), cell.key)

    all_rows = [m for rows in per_cell for m in rows]
    all_extra = [e for ex in extras for e in ex]
    (out / "episodes.csv").write_text(metrics_csv(all_rows, cfg.thresholds, all_extra), encoding="utf-8")
    written.append(Path("episodes.csv"))

    aggregates = {}
    for cell, rows in zip(cells, per_cell):
        if rows:
            aggregates[cell.key] = aggregate(rows, cfg.thresholds, label=cell.key)
    summary = f"# {cfg.name}\n\n" + markdown_table(list(aggregates.values()), cfg.thresholds)
    (out / "summary.md").write_text(summary, encoding="utf-8")
    written.append(Path("summary.md"))

    failed = [cell.key for cell, errs in zip(cells, errors) if errs]
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "artifact": {"package": "teamexplore", "version": __version__},
        "dependencies": _dependency_versions(),
        "config": cfg.to_dict(),
        "cells": [
            {
                "key": cell.key,
                "slug": cell.slug,
                "episodes": len(rows),
                "status": "failed" if errs else "ok",
                "errors": errs,
            }
            for cell, rows, errs in zip(cells, per_cell, errors)
        ],
        "files": {p.as_posix(): _sha256(out / p) for p in sorted(written)},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return ExperimentResult(out, manifest, aggregates, failed)
