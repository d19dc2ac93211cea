"""Command line entry point.

Exit codes: 0 success, 1 runtime failure (including failed episodes or a
replay mismatch), 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import ConfigurationError, TeamExploreError
from ..sim import EpisodeLog, replay
from .config import load_config
from .dataset import export_dataset
from .plots import emit_plots
from .presets import PRESETS, load_preset
from .runner import WORKERS_ENV, run_experiment

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2


def _progress(quiet):
    if quiet:
        return None

    def report(done, total, key):
        print(f"\r[{done}/{total}] {key}", end="", file=sys.stderr, flush=True)
        if done == total:
            print(file=sys.stderr)
    return report


def _finish(result) -> int:
    print(f"results written to {result.out_dir}")
    print((result.out_dir / "summary.md").read_text(encoding="utf-8"))
    if result.failed:
        print("failed cells: " + ", ".join(result.failed), file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    return _finish(run_experiment(cfg, args.out, args.workers, _progress(args.quiet)))


def cmd_preset(args) -> int:
    cfg = load_preset(args.name, episodes=args.episodes, master_seed=args.seed)
    out = args.out if args.out is not None else Path("results") / args.name
    return _finish(run_experiment(cfg, out, args.workers, _progress(args.quiet)))


def _log_paths(paths) -> list[Path]:
    found = []
    for p in map(Path, paths):
        if p.is_dir():
            found.extend(sorted(p.rglob("*.jsonl")))
        elif p.is_file():
            found.append(p)
        else:
            raise FileNotFoundError(f"no such log file or directory: {p}")
    return found


def cmd_export(args) -> int:
    logs = _log_paths(args.logs)
    n = export_dataset(logs, args.out, rotate=args.rotate)
    print(f"{n} records from {len(logs)} episodes written to {args.out}")
    return EXIT_OK


def cmd_plot(args) -> int:
    files = emit_plots(args.result_dir)
    print(f"{len(files)} SVG files written to {Path(args.result_dir) / 'plots'}")
    return EXIT_OK


def cmd_replay(args) -> int:
    log = EpisodeLog.load(args.log)
    result = replay(log)
    print(f"logged final ER   {log.final_er!r}")
    print(f"replayed final ER {result.final_er!r}")
    if result.matches:
        print("replay matches")
        return EXIT_OK
    print(f"replay differs at steps {result.mismatches[:10]}", file=sys.stderr)
    return EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teamexplore", description="Multi-agent exploration experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_options(p):
        p.add_argument("--out", type=Path, default=None, help="result directory")
        p.add_argument("--workers", type=int, default=None,
                       help=f"worker processes (overridden by ${WORKERS_ENV})")
        p.add_argument("--quiet", action="store_true", help="no progress output")

    p = sub.add_parser("run", help="run an experiment config file")
    p.add_argument("config", type=Path)
    add_run_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a shipped experiment preset")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--episodes", type=int, default=None, help="episodes per matrix cell")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    add_run_options(p)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("export-dataset", help="export decision tuples from episode logs")
    p.add_argument("logs", nargs="+", help="log files or directories searched for *.jsonl")
    p.add_argument("out", type=Path, help="dataset .jsonl path (arrays go to <out>.bin)")
    p.add_argument("--rotate", action="store_true", help="rotate agent-centric maps with the heading")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("plot", help="write SVG plots for a result directory")
    p.add_argument("result_dir", type=Path)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("replay", help="re-derive an episode's coverage from its log")
    p.add_argument("log", type=Path)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "episodes", None) is not None and args.episodes < 1:
        print("error: --episodes must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TeamExploreError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
