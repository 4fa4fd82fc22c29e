"""Batch figure rendering from wps benchmark artifacts.

Each figure reads only the pipeline's CSV files and never recomputes a
statistic: the regression line comes verbatim from regression.csv, the
fault-rate bars from histogram.csv, and the raw-sample plots (violins,
boxes, scatter) draw the runs.csv columns as stored. Inputs are
schema-checked up front; a missing column fails with the column and
figure id in the message.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "SchemaError", "FIGURE_IDS", "build_figure", "render"]

ACCURACY_SYSTEM = "faultless"
FAILURE_SYSTEMS = ("proposed", "industry")
REGRESSION_SYSTEM = "proposed"


class SchemaError(ValueError):
    """An input CSV does not carry the columns a figure needs."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: dict[str, str] = field(default_factory=dict)  # name -> csv path
    output: str = ""


def _read_csv(path: str, required: tuple[str, ...], figure_id: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaError(
                    f"{figure_id}: input {os.path.basename(path)} is missing "
                    f"column {column!r} (has {header})"
                )
        return list(reader)


def _surface_grid(rows: list[dict]):
    xs = sorted({int(r["x"]) for r in rows})
    ys = sorted({int(r["y"]) for r in rows})
    z = np.zeros((len(ys), len(xs)))
    for r in rows:
        z[int(r["y"]), int(r["x"])] = float(r["q"])
    gx, gy = np.meshgrid(np.array(xs, dtype=float), np.array(ys, dtype=float))
    return gx, gy, z


def _fig_surface(spec: FigureSpec):
    rows = _read_csv(spec.inputs["qsurface"], ("x", "y", "q"), spec.figure_id)
    gx, gy, z = _surface_grid(rows)
    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(gx, gy, z, cmap="viridis", edgecolor="k", linewidth=0.3)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("Q value")
    ax.set_title("Learned value surface")
    return fig


def _fig_bars(spec: FigureSpec):
    rows = _read_csv(spec.inputs["qsurface"], ("x", "y", "q"), spec.figure_id)
    gx, gy, z = _surface_grid(rows)
    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(projection="3d")
    heights = z.ravel()
    bottoms = np.minimum(heights, 0.0)
    ax.bar3d(
        gx.ravel() - 0.4,
        gy.ravel() - 0.4,
        bottoms,
        0.8,
        0.8,
        np.abs(heights),
        shade=True,
        color="tab:blue",
    )
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("Q value")
    ax.set_title("Learned value bars")
    return fig


def _fig_accuracy(spec: FigureSpec):
    rows = _read_csv(
        spec.inputs["runs"],
        ("classifier", "system", "severity", "accuracy_pct"),
        spec.figure_id,
    )
    rows = [r for r in rows if r["system"] == ACCURACY_SYSTEM and r["severity"] == "1"]
    groups: dict[str, list[float]] = {}
    for r in rows:
        groups.setdefault(r["classifier"], []).append(float(r["accuracy_pct"]))
    names = sorted(groups, key=lambda n: -np.mean(groups[n]))
    data = [groups[n] for n in names]
    fig, (ax_v, ax_b) = plt.subplots(1, 2, figsize=(10, 4.5), sharey=True)
    if data:
        ax_v.violinplot(data, showmeans=True)
        ax_b.boxplot(data)
        for ax in (ax_v, ax_b):
            ax.set_xticks(range(1, len(names) + 1))
            ax.set_xticklabels(names)
    ax_v.set_ylabel("pick accuracy (%)")
    ax_v.set_title("Accuracy distribution per classifier")
    ax_b.set_title("Accuracy spread per classifier")
    fig.tight_layout()
    return fig


def _fig_failures(spec: FigureSpec):
    runs = _read_csv(
        spec.inputs["runs"],
        ("system", "severity", "failure_rate_pct"),
        spec.figure_id,
    )
    hist = _read_csv(
        spec.inputs["histogram"],
        ("bin_lo", "bin_hi", "proposed", "industry"),
        spec.figure_id,
    )
    groups = {
        system: [
            float(r["failure_rate_pct"])
            for r in runs
            if r["system"] == system and r["severity"] == "1"
        ]
        for system in FAILURE_SYSTEMS
    }
    fig, (ax_box, ax_hist) = plt.subplots(1, 2, figsize=(10, 4.5))
    present = [s for s in FAILURE_SYSTEMS if groups[s]]
    if present:
        ax_box.boxplot([groups[s] for s in present])
        ax_box.set_xticks(range(1, len(present) + 1))
        ax_box.set_xticklabels(present)
    ax_box.set_ylabel("failure rate (%)")
    ax_box.set_title("Failure rate per system")

    bins = [r for r in hist if r["bin_lo"] != "overflow"]
    centers = [(float(r["bin_lo"]) + float(r["bin_hi"])) / 2 for r in bins]
    width = 0.4 * (float(bins[0]["bin_hi"]) - float(bins[0]["bin_lo"])) if bins else 0.2
    ax_hist.bar(
        [c - width / 2 for c in centers],
        [int(r["proposed"]) for r in bins],
        width=width,
        label="proposed",
    )
    ax_hist.bar(
        [c + width / 2 for c in centers],
        [int(r["industry"]) for r in bins],
        width=width,
        label="industry",
    )
    ax_hist.set_xlabel("failure rate bin (%)")
    ax_hist.set_ylabel("runs")
    ax_hist.set_title("Fault-rate distribution")
    ax_hist.legend()
    fig.tight_layout()
    return fig


def _fig_regression(spec: FigureSpec):
    runs = _read_csv(
        spec.inputs["runs"],
        ("system", "severity", "performance_score"),
        spec.figure_id,
    )
    reg_rows = _read_csv(
        spec.inputs["regression"],
        ("slope", "intercept", "r_squared"),
        spec.figure_id,
    )
    pts = [
        (float(r["severity"]), float(r["performance_score"]))
        for r in runs
        if r["system"] == REGRESSION_SYSTEM
    ]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if pts:
        ax.scatter(*zip(*pts), s=12, alpha=0.45, label="runs")
    if reg_rows:
        slope = float(reg_rows[0]["slope"])
        intercept = float(reg_rows[0]["intercept"])
        xs = [1.0, 10.0]
        ys = [intercept + slope * x for x in xs]
        line, = ax.plot(xs, ys, color="tab:red", linewidth=2, label="fit")
        line.set_gid(f"fit;slope={slope!r};intercept={intercept!r}")
        ax.set_title(
            f"score = {intercept:.3f} {slope:+.3f} x severity "
            f"(r2 = {float(reg_rows[0]['r_squared']):.3f})"
        )
    ax.set_xlabel("environmental severity")
    ax.set_ylabel("performance score")
    ax.legend()
    fig.tight_layout()
    return fig


_BUILDERS = {
    "f2_surface": (_fig_surface, ("qsurface",)),
    "f3_bars": (_fig_bars, ("qsurface",)),
    "f4_accuracy": (_fig_accuracy, ("runs",)),
    "f5_failures": (_fig_failures, ("runs", "histogram")),
    "f6_regression": (_fig_regression, ("runs", "regression")),
}

FIGURE_IDS = tuple(_BUILDERS)

DEFAULT_INPUTS = {
    "qsurface": "qsurface_pick.csv",
    "runs": "runs.csv",
    "histogram": "histogram.csv",
    "regression": "regression.csv",
}


def default_spec(figure_id: str, analysis_dir: str, out_dir: str) -> FigureSpec:
    if figure_id not in _BUILDERS:
        raise SchemaError(f"unknown figure id {figure_id!r}; know {FIGURE_IDS}")
    _, needed = _BUILDERS[figure_id]
    return FigureSpec(
        figure_id=figure_id,
        inputs={
            name: os.path.join(analysis_dir, DEFAULT_INPUTS[name]) for name in needed
        },
        output=os.path.join(out_dir, f"{figure_id}.png"),
    )


def build_figure(spec: FigureSpec):
    """Build the matplotlib figure for a spec (no file output)."""
    if spec.figure_id not in _BUILDERS:
        raise SchemaError(f"unknown figure id {spec.figure_id!r}; know {FIGURE_IDS}")
    builder, needed = _BUILDERS[spec.figure_id]
    for name in needed:
        if name not in spec.inputs:
            raise SchemaError(f"{spec.figure_id}: missing input {name!r}")
    return builder(spec)


def render(spec: FigureSpec) -> str:
    """Render a spec to its output image; returns the written path."""
    fig = build_figure(spec)
    try:
        os.makedirs(os.path.dirname(spec.output) or ".", exist_ok=True)
        fig.savefig(spec.output, dpi=120)
    finally:
        plt.close(fig)
    return spec.output
