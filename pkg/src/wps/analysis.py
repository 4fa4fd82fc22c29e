"""Aggregation of run records into the benchmark artifacts.

Condition conventions (all by column value, so the runs CSV is self-contained):

  * classifier accuracy: severity-1 runs of the fault-free system
    ("faultless"), grouped by classifier;
  * failure rates and the fault-rate histogram: severity-1 runs of each
    faulted system ("proposed", "industry");
  * severity regression and the degradation sign test: all runs of the
    "proposed" system, using run-level (severity, performance_score) points.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from typing import Optional, Sequence

from .stats import (
    ComparisonRow,
    Histogram,
    RegressionFit,
    RunRecord,
    SummaryStats,
    compare_to_reference,
    histogram,
    ols_fit,
    sign_test_p,
    summarize,
)

__all__ = [
    "Analysis",
    "RUNS_HEADER",
    "ACCURACY_SYSTEM",
    "FAILURE_SYSTEMS",
    "REGRESSION_SYSTEM",
    "HIST_RANGE",
    "HIST_WIDTH",
    "write_runs_csv",
    "read_runs_csv",
    "analyze_runs",
    "write_artifacts",
]

RUNS_HEADER = [
    "run_id",
    "system",
    "classifier",
    "severity",
    "seed",
    "accuracy_pct",
    "failure_rate_pct",
    "performance_score",
    "steps",
    "orders_completed",
]

ACCURACY_SYSTEM = "faultless"
FAILURE_SYSTEMS = ("proposed", "industry")
REGRESSION_SYSTEM = "proposed"
HIST_RANGE = (0.0, 3.5)
HIST_WIDTH = 0.5


class MalformedRunsError(ValueError):
    """A runs CSV row failed to parse; the message carries the line number."""


def write_runs_csv(records: Sequence[RunRecord], path: str) -> None:
    """Emit valid records sorted by run_id; floats keep full precision."""
    rows = sorted((r for r in records if r.valid), key=lambda r: r.run_id)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(RUNS_HEADER)
        for r in rows:
            w.writerow(
                [
                    r.run_id,
                    r.system,
                    r.classifier,
                    r.severity,
                    r.seed,
                    repr(r.accuracy_pct),
                    repr(r.failure_rate_pct),
                    repr(r.performance_score),
                    r.steps,
                    r.orders_completed,
                ]
            )


def read_runs_csv(path: str) -> list[RunRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != RUNS_HEADER:
            raise MalformedRunsError(
                f"{path}:1: bad header {header!r}, expected {RUNS_HEADER!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                records.append(
                    RunRecord(
                        run_id=int(row[0]),
                        system=row[1],
                        classifier=row[2],
                        severity=int(row[3]),
                        seed=int(row[4]),
                        accuracy_pct=float(row[5]),
                        failure_rate_pct=float(row[6]),
                        performance_score=float(row[7]),
                        steps=int(row[8]),
                        orders_completed=int(row[9]),
                    )
                )
            except (IndexError, ValueError) as e:
                raise MalformedRunsError(f"{path}:{lineno}: {e}") from e
    return records


@dataclass(frozen=True)
class Analysis:
    accuracy: dict[str, SummaryStats]  # classifier -> accuracy_pct stats
    failure: dict[str, SummaryStats]  # system -> failure_rate_pct stats
    histograms: dict[str, Histogram]  # system -> fault-rate histogram
    severity_scores: dict[int, SummaryStats]  # level -> performance stats
    fit: Optional[RegressionFit]
    sign_test: Optional[dict]  # degradation test at the deepest swept level
    comparison: list[ComparisonRow]


def analyze_runs(records: Sequence[RunRecord]) -> Analysis:
    records = [r for r in records if r.valid]

    accuracy: dict[str, SummaryStats] = {}
    acc_rows = [r for r in records if r.system == ACCURACY_SYSTEM and r.severity == 1]
    for name in sorted({r.classifier for r in acc_rows}):
        accuracy[name] = summarize(
            [r.accuracy_pct for r in acc_rows if r.classifier == name]
        )

    failure: dict[str, SummaryStats] = {}
    histograms: dict[str, Histogram] = {}
    for system in FAILURE_SYSTEMS:
        rates = [
            r.failure_rate_pct
            for r in records
            if r.system == system and r.severity == 1
        ]
        if rates:
            failure[system] = summarize(rates)
            histograms[system] = histogram(rates, *HIST_RANGE, HIST_WIDTH)

    sweep = [r for r in records if r.system == REGRESSION_SYSTEM]
    severity_scores: dict[int, SummaryStats] = {}
    for level in sorted({r.severity for r in sweep}):
        severity_scores[level] = summarize(
            [r.performance_score for r in sweep if r.severity == level]
        )

    fit: Optional[RegressionFit] = None
    points = [(float(r.severity), r.performance_score) for r in sweep]
    if len({x for x, _ in points}) >= 2:
        fit = ols_fit(points)

    sign_test = None
    if sweep:
        deepest = max(r.severity for r in sweep)
        if deepest > 1:
            deep_rows = [r for r in sweep if r.severity == deepest]
            down = sum(1 for r in deep_rows if r.performance_score < 10.0)
            sign_test = {
                "level": deepest,
                "n": len(deep_rows),
                "degraded": down,
                "p_value": sign_test_p(down, len(deep_rows)),
            }

    comparison = compare_to_reference(
        accuracy_means={name: s.mean for name, s in accuracy.items()},
        failure_means={name: s.mean for name, s in failure.items()},
        modal_bins={name: h.modal_bin() for name, h in histograms.items()},
        fit=fit,
    )
    return Analysis(
        accuracy=accuracy,
        failure=failure,
        histograms=histograms,
        severity_scores=severity_scores,
        fit=fit,
        sign_test=sign_test,
        comparison=comparison,
    )


def _stats_dict(s: SummaryStats) -> dict:
    return {
        "n": s.n,
        "mean": s.mean,
        "sd": s.sd,
        "min": s.min,
        "max": s.max,
        "sd_defined": s.sd_defined,
    }


def write_artifacts(analysis: Analysis, out_dir: str) -> dict[str, str]:
    """Write summary.json, histogram.csv, regression.csv, comparison.csv."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    summary = {
        "accuracy": {k: _stats_dict(v) for k, v in analysis.accuracy.items()},
        "failure": {k: _stats_dict(v) for k, v in analysis.failure.items()},
        "severity_scores": {
            str(k): _stats_dict(v) for k, v in analysis.severity_scores.items()
        },
        "regression": None
        if analysis.fit is None
        else {
            "slope": analysis.fit.slope,
            "intercept": analysis.fit.intercept,
            "r_squared": analysis.fit.r_squared,
            "fit_at_1": analysis.fit.at(1.0),
            "fit_at_10": analysis.fit.at(10.0),
        },
        "sign_test": analysis.sign_test,
        "comparison": [
            {
                "metric": row.metric,
                "reference": row.reference,
                "measured": row.measured,
                "tolerance": row.tolerance,
                "status": "pass" if row.passed else "fail",
                "note": row.note,
            }
            for row in analysis.comparison
        ],
    }
    paths["summary.json"] = os.path.join(out_dir, "summary.json")
    with open(paths["summary.json"], "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=1, sort_keys=True)
        f.write("\n")

    paths["histogram.csv"] = os.path.join(out_dir, "histogram.csv")
    with open(paths["histogram.csv"], "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "proposed", "industry"])
        lo, hi = HIST_RANGE
        nbins = round((hi - lo) / HIST_WIDTH)
        empty = Histogram(
            tuple(lo + i * HIST_WIDTH for i in range(nbins + 1)),
            tuple([0] * nbins),
            0,
        )
        hp = analysis.histograms.get("proposed", empty)
        hi_ = analysis.histograms.get("industry", empty)
        for i in range(nbins):
            w.writerow(
                [
                    repr(hp.bin_edges[i]),
                    repr(hp.bin_edges[i + 1]),
                    hp.counts[i],
                    hi_.counts[i],
                ]
            )
        w.writerow(["overflow", "", hp.overflow, hi_.overflow])

    paths["regression.csv"] = os.path.join(out_dir, "regression.csv")
    with open(paths["regression.csv"], "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["slope", "intercept", "r_squared", "fit_at_1", "fit_at_10"])
        if analysis.fit is not None:
            fit = analysis.fit
            w.writerow(
                [
                    repr(fit.slope),
                    repr(fit.intercept),
                    repr(fit.r_squared),
                    repr(fit.at(1.0)),
                    repr(fit.at(10.0)),
                ]
            )

    paths["comparison.csv"] = os.path.join(out_dir, "comparison.csv")
    with open(paths["comparison.csv"], "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["metric", "reference", "measured", "tolerance", "status", "note"])
        for row in analysis.comparison:
            w.writerow(
                [
                    row.metric,
                    "" if row.reference is None else repr(row.reference),
                    "" if row.measured is None else repr(row.measured),
                    row.tolerance,
                    "pass" if row.passed else "fail",
                    row.note,
                ]
            )
    return paths
