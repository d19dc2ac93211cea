"""Coverage curves and trajectory overlays as plain SVG.

Drawing uses data coordinates inside a transformed group, so the polyline
vertices in the file are the raw (step, ER) or (x, y) values and can be read
back exactly. No timestamps or random ids are written.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from ..sim import EpisodeConfig, EpisodeLog
from ..world import build_world
from ..world.grid import OBSTACLE

SVG_NS = "http://www.w3.org/2000/svg"
AGENT_COLOURS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _num(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _points(xs, ys) -> str:
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in zip(xs, ys))


def _svg(width: int, height: int) -> ET.Element:
    ET.register_namespace("", SVG_NS)
    return ET.Element(f"{{{SVG_NS}}}svg", {
        "width": str(width), "height": str(height), "viewBox": f"0 0 {width} {height}",
    })


def _sub(parent, tag, **attrs) -> ET.Element:
    return ET.SubElement(parent, f"{{{SVG_NS}}}{tag}", {k.replace("_", "-"): str(v) for k, v in attrs.items()})


def _write(root: ET.Element, path: Path) -> None:
    ET.indent(root)
    path.write_text(ET.tostring(root, encoding="unicode") + "\n", encoding="utf-8")


def coverage_band(series_list) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(steps, mean, std) over ER series; a finished episode holds its last value."""
    length = max(len(s) for s in series_list)
    padded = np.array([list(s) + [s[-1]] * (length - len(s)) for s in series_list], dtype=np.float64)
    return np.arange(length), padded.mean(axis=0), padded.std(axis=0)


def coverage_svg(series_list, path, title: str = "", width: int = 640, height: int = 400) -> None:
    steps, mean, std = coverage_band(series_list)
    margin = 50
    pw, ph = width - 2 * margin, height - 2 * margin
    sx = pw / max(len(steps) - 1, 1)
    root = _svg(width, height)
    _sub(root, "title").text = title
    _sub(root, "rect", x=margin, y=margin, width=pw, height=ph, fill="none", stroke="#888")
    # data frame: x = movement step, y = exploration ratio in [0, 1]
    g = _sub(root, "g", id="data", transform=f"translate({margin},{margin + ph}) scale({_num(sx)},{-ph})")
    lo, hi = np.clip(mean - std, 0, 1), np.clip(mean + std, 0, 1)
    band = list(zip(steps, hi)) + list(zip(steps[::-1], lo[::-1]))
    _sub(g, "polygon", id="band", points=_points([p[0] for p in band], [p[1] for p in band]),
         fill="#1f77b4", fill_opacity="0.25", stroke="none")
    _sub(g, "polyline", id="mean", points=_points(steps, mean), fill="none", stroke="#1f77b4",
         stroke_width="2", vector_effect="non-scaling-stroke")
    for frac in (0.0, 0.5, 0.85, 0.95, 1.0):
        y = margin + ph * (1 - frac)
        _sub(root, "text", x=margin - 6, y=_num(y + 4), text_anchor="end", font_size="11").text = f"{frac:g}"
    _sub(root, "text", x=margin + pw, y=height - margin + 16, text_anchor="end",
         font_size="11").text = f"{len(steps) - 1} steps"
    _write(root, Path(path))


def _obstacle_runs(cells: np.ndarray):
    """Horizontal runs of obstacle cells as (row, col_start, length)."""
    for r in range(cells.shape[0]):
        row = np.concatenate([[False], cells[r] == OBSTACLE, [False]]).astype(np.int8)
        edges = np.flatnonzero(np.diff(row))
        for start, stop in zip(edges[::2], edges[1::2]):
            yield r, int(start), int(stop - start)


def trajectory_svg(log: EpisodeLog, path, scale: float = 4.0) -> None:
    cfg = EpisodeConfig.from_dict(log.header["config"])
    truth = build_world(cfg.scenario)
    res = truth.resolution
    w_m, h_m = truth.side_x, truth.side_y
    root = _svg(int(round(w_m * scale)), int(round(h_m * scale)))
    _sub(root, "title").text = f"seed {cfg.seed} final ER {log.final_er:.4f}"
    g = _sub(root, "g", id="world", transform=f"translate(0,{_num(h_m * scale)}) scale({_num(scale)},{_num(-scale)})")
    _sub(g, "rect", x=0, y=0, width=_num(w_m), height=_num(h_m), fill="#ffffff")
    walls = _sub(g, "g", id="obstacles", fill="#222222")
    for r, c, n in _obstacle_runs(truth.cells):
        _sub(walls, "rect", x=_num(c * res), y=_num(r * res), width=_num(n * res), height=_num(res))
    pos = np.array([[a[:2] for a in s["agents"]] for s in log.steps], dtype=np.float64)
    for i in range(pos.shape[1]):
        colour = AGENT_COLOURS[i % len(AGENT_COLOURS)]
        _sub(g, "polyline", id=f"agent{i}", points=_points(pos[:, i, 0], pos[:, i, 1]), fill="none",
             stroke=colour, stroke_width="1.5", vector_effect="non-scaling-stroke")
        _sub(g, "circle", cx=_num(pos[0, i, 0]), cy=_num(pos[0, i, 1]), r="1", fill=colour)
    _write(root, Path(path))


def emit_plots(result_dir) -> list[Path]:
    """One coverage curve per cell and one trajectory overlay per episode."""
    result_dir = Path(result_dir)
    manifest_path = result_dir / "manifest.json"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no manifest.json in {result_dir}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    plot_dir = result_dir / "plots"
    plot_dir.mkdir(exist_ok=True)
    written = []
    for cell in manifest["cells"]:
        logs = sorted((result_dir / "logs" / cell["slug"]).glob("ep*.jsonl"))
        if not logs:
            continue
        series = []
        for log_path in logs:
            log = EpisodeLog.load(log_path)
            series.append(log.er_series)
            out = plot_dir / f"traj_{cell['slug']}_{log_path.stem}.svg"
            trajectory_svg(log, out)
            written.append(out)
        out = plot_dir / f"coverage_{cell['slug']}.svg"
        coverage_svg(series, out, title=cell["key"])
        written.append(out)
    return written
