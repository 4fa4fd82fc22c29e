"""Command-line pipeline: train -> simulate -> analyze -> report.

Every stage reads and writes plain files, carries no timestamps, and derives
all randomness from the config's base seed, so rerunning a stage reproduces
its artifacts byte for byte (also across worker-pool sizes).

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import os
import random
import sys
from typing import Optional, Sequence

from . import analysis as an
from .engine import training_env
from .experiment import ConfigError, execute_runs, load_config, run_specs
from .qlearning import export_q_surface, load_qtable, save_qtable, train
from .report import MissingArtifactError, render_report
from .warehouse import ACTIONS, Layout, StateId


def _surface_target(layout: Layout) -> Optional[tuple[int, int]]:
    catalog = layout.catalog
    return layout.home_shelf[catalog[0]] if catalog else None


def cmd_train(config_path: str, out_dir: str) -> None:
    config = load_config(config_path)
    os.makedirs(out_dir, exist_ok=True)
    q, curve = train(
        training_env(config.world), config.qparams, random.Random(config.base_seed)
    )
    save_qtable(q, os.path.join(out_dir, "qtable.json"))

    with open(
        os.path.join(out_dir, "learning_curve.csv"), "w", encoding="utf-8", newline=""
    ) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["episode", "return", "steps"])
        for i, (ret, steps) in enumerate(
            zip(curve.per_episode_return, curve.per_episode_steps)
        ):
            w.writerow([i, repr(ret), steps])

    layout = config.world.layout
    target = _surface_target(layout)
    for action in ACTIONS:
        rows = export_q_surface(
            q, layout.width, layout.height, carrying=False, target=target, action=action
        )
        path = os.path.join(out_dir, f"qsurface_{action.label}.csv")
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["x", "y", "q"])
            for x, y, v in rows:
                w.writerow([x, y, repr(v)])
    print(f"wrote qtable.json, learning_curve.csv, qsurface_*.csv to {out_dir}")


def _check_layout_compat(qtable, layout: Layout) -> None:
    shelves = layout.shelves
    for (s, _a) in qtable.values:
        assert isinstance(s, StateId)
        if not layout.in_bounds(s.x, s.y) or (s.x, s.y) in shelves:
            raise ConfigError(
                f"qtable/layout mismatch: state cell ({s.x}, {s.y}) is not a "
                "walkable cell of the configured warehouse"
            )
        if s.target is not None and s.target not in shelves:
            raise ConfigError(
                f"qtable/layout mismatch: target {s.target} is not a shelf "
                "of the configured warehouse"
            )


def cmd_simulate(config_path: str, qtable_path: str, out_dir: str, workers: int) -> None:
    config = load_config(config_path)
    if not os.path.exists(qtable_path):
        raise FileNotFoundError(f"missing qtable checkpoint: {qtable_path}")
    q = load_qtable(qtable_path)
    _check_layout_compat(q, config.world.layout)
    os.makedirs(out_dir, exist_ok=True)
    specs = run_specs(config)
    records = execute_runs(
        config,
        q,
        workers=workers,
        config_path=config_path,
        qtable_path=qtable_path,
        specs=specs,
    )
    invalid = sum(1 for r in records if not r.valid)
    if invalid:
        print(f"warning: {invalid} run(s) invalid (no picks); excluded", file=sys.stderr)
    path = os.path.join(out_dir, "runs.csv")
    an.write_runs_csv(records, path)
    print(f"wrote {len(records) - invalid} runs to {path}")


def cmd_analyze(runs_path: str, out_dir: str) -> None:
    records = an.read_runs_csv(runs_path)
    result = an.analyze_runs(records)
    paths = an.write_artifacts(result, out_dir)
    print("wrote " + ", ".join(sorted(paths)))


def cmd_report(analysis_dir: str, out_path: str) -> None:
    text = render_report(analysis_dir)
    with open(out_path, "w", encoding="utf-8") as f:
        f.write(text)
    print(f"wrote {out_path}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wps",
        description="Warehouse picking simulator benchmark pipeline.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train the picking policy, export surfaces")
    t.add_argument("--config", required=True)
    t.add_argument("--out", required=True)

    s = sub.add_parser("simulate", help="run the replicated measurement campaign")
    s.add_argument("--config", required=True)
    s.add_argument("--qtable", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1)

    a = sub.add_parser("analyze", help="aggregate a runs CSV into artifacts")
    a.add_argument("--runs", required=True)
    a.add_argument("--out", required=True)

    r = sub.add_parser("report", help="render the markdown report")
    r.add_argument("--in", dest="analysis_dir", required=True)
    r.add_argument("--out", required=True)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            cmd_train(args.config, args.out)
        elif args.command == "simulate":
            cmd_simulate(args.config, args.qtable, args.out, args.workers)
        elif args.command == "analyze":
            cmd_analyze(args.runs, args.out)
        elif args.command == "report":
            cmd_report(args.analysis_dir, args.out)
    except (ConfigError, an.MalformedRunsError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, MissingArtifactError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
