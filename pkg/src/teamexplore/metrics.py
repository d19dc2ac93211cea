"""Per-episode and aggregate exploration metrics.

Means and standard deviations use ``math.fsum`` so an aggregate does not
depend on the order episodes arrive in. Standard deviations are population
(divide by n).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, LogParseError

DEFAULT_THRESHOLDS = (0.85, 0.95)
SENTINEL = "- (-)"


def _pct(tau: float) -> str:
    return f"{round(tau * 100):d}"


@dataclass(frozen=True)
class EpisodeMetrics:
    er: float
    cs: dict          # threshold -> movement steps, or None
    pl: dict          # threshold -> metres, or None
    success: dict     # threshold -> bool
    rv: float
    n_agents: int = 0
    seed: int | None = None

    def to_row(self, thresholds=DEFAULT_THRESHOLDS) -> dict:
        row = {"seed": self.seed, "n_agents": self.n_agents, "er": self.er}
        for tau in thresholds:
            p = _pct(tau)
            row[f"cs{p}"] = self.cs[tau]
            row[f"pl{p}"] = self.pl[tau]
            row[f"success{p}"] = int(self.success[tau])
        row["rv"] = self.rv
        return row


def population_variance(values) -> float:
    vals = [float(v) for v in values]
    if not vals:
        raise DomainError("variance of an empty sequence")
    mean = math.fsum(vals) / len(vals)
    return math.fsum((v - mean) ** 2 for v in vals) / len(vals)


def mean_std(values) -> tuple[float, float]:
    vals = sorted(float(v) for v in values)
    if not vals:
        raise DomainError("mean of an empty sequence")
    return math.fsum(vals) / len(vals), math.sqrt(population_variance(vals))


def _positions(log) -> np.ndarray:
    return np.array([[a[:2] for a in s["agents"]] for s in log.steps], dtype=np.float64)


def episode_metrics(log, thresholds=DEFAULT_THRESHOLDS) -> EpisodeMetrics:
    """Coverage, step and distance figures for one finished episode."""
    if log.summary is None or not log.steps:
        raise LogParseError("episode log is incomplete")
    thresholds = tuple(float(t) for t in thresholds)
    er = np.array(log.er_series)
    pos = _positions(log)
    # cumulative team distance travelled after each step record
    seg = np.sqrt(((pos[1:] - pos[:-1]) ** 2).sum(axis=2)).sum(axis=1)
    travelled = np.concatenate([[0.0], np.cumsum(seg)])

    cs, pl, success = {}, {}, {}
    for tau in thresholds:
        hit = np.flatnonzero(er >= tau)
        if hit.size:
            k = int(hit[0])
            cs[tau] = k
            pl[tau] = float(travelled[k])
            success[tau] = True
        else:
            cs[tau] = None
            pl[tau] = None
            success[tau] = False

    n = log.n_agents
    totals = [[] for _ in range(n)]
    for dec in log.decisions:
        for i, r in enumerate(dec["rewards"]):
            totals[i].append(float(r["combined"]))
    rv = population_variance([math.fsum(t) for t in totals]) if n else 0.0
    seed = log.header.get("config", {}).get("seed")
    return EpisodeMetrics(float(log.final_er), cs, pl, success, rv, n, seed)


@dataclass(frozen=True)
class AggregateRow:
    label: str
    episodes: int
    er: tuple
    cs: dict              # threshold -> (mean, std) or None
    pl: dict
    sr: dict              # threshold -> percentage
    rv: tuple
    samples: dict = field(default_factory=dict)   # threshold -> episodes with CS/PL present


def aggregate(rows, thresholds=DEFAULT_THRESHOLDS, label: str = "") -> AggregateRow:
    rows = list(rows)
    if not rows:
        raise DomainError("aggregate needs at least one episode")
    thresholds = tuple(float(t) for t in thresholds)
    cs, pl, sr, samples = {}, {}, {}, {}
    for tau in thresholds:
        cs_vals = [r.cs[tau] for r in rows if r.cs[tau] is not None]
        pl_vals = [r.pl[tau] for r in rows if r.pl[tau] is not None]
        cs[tau] = mean_std(cs_vals) if cs_vals else None
        pl[tau] = mean_std(pl_vals) if pl_vals else None
        sr[tau] = 100.0 * sum(1 for r in rows if r.success[tau]) / len(rows)
        samples[tau] = len(cs_vals)
    return AggregateRow(
        label=label,
        episodes=len(rows),
        er=mean_std([r.er for r in rows]),
        cs=cs,
        pl=pl,
        sr=sr,
        rv=mean_std([r.rv for r in rows]),
        samples=samples,
    )


def _cell(pair, scale: float = 1.0, digits: int = 2) -> str:
    if pair is None:
        return SENTINEL
    m, s = pair
    return f"{m * scale:.{digits}f} ({s * scale:.{digits}f})"


def table_header(thresholds=DEFAULT_THRESHOLDS) -> list[str]:
    low_high = sorted(thresholds)
    cols = ["ER"]
    cols += [f"{_pct(t)}%CS" for t in low_high]
    cols += [f"{_pct(t)}%PL" for t in low_high]
    cols += ["RV"]
    cols += [f"{_pct(t)}%SR" for t in sorted(thresholds, reverse=True)]
    return cols


def table_cells(row: AggregateRow, thresholds=DEFAULT_THRESHOLDS) -> list[str]:
    low_high = sorted(float(t) for t in thresholds)
    cells = [_cell(row.er, 100.0)]
    cells += [_cell(row.cs[t], digits=1) for t in low_high]
    cells += [_cell(row.pl[t], digits=1) for t in low_high]
    cells += [_cell(row.rv)]
    cells += [f"{row.sr[t]:.1f}" for t in sorted(low_high, reverse=True)]
    return cells


def markdown_table(rows, thresholds=DEFAULT_THRESHOLDS) -> str:
    """Aggregate rows as a markdown table; ER and SR are percentages."""
    header = ["Setting", "N"] + table_header(thresholds)
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for row in rows:
        cells = [row.label, str(row.episodes)] + table_cells(row, thresholds)
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def metrics_csv(rows, thresholds=DEFAULT_THRESHOLDS, extra: list[dict] | None = None) -> str:
    """One CSV line per episode. ``extra[i]`` columns are prepended to row i."""
    rows = list(rows)
    dicts = []
    for i, r in enumerate(rows):
        d = dict(extra[i]) if extra else {}
        d.update(r.to_row(thresholds))
        dicts.append(d)
    if not dicts:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(dicts[0]), lineterminator="\n")
    writer.writeheader()
    for d in dicts:
        writer.writerow({k: _fmt(v) for k, v in d.items()})
    return buf.getvalue()
