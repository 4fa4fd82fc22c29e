"""Markdown benchmark report rendered from the analysis artifacts."""

from __future__ import annotations

import csv
import json
import os

__all__ = ["MissingArtifactError", "render_report"]

REQUIRED = ("summary.json", "histogram.csv", "regression.csv", "comparison.csv")


class MissingArtifactError(FileNotFoundError):
    def __init__(self, missing: list[str]):
        super().__init__("missing analysis artifacts: " + ", ".join(missing))
        self.missing = missing


def _stats_table(stats_by_key: dict, key_header: str) -> list[str]:
    lines = [
        f"| {key_header} | n | mean | sd | min | max |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for key, s in stats_by_key.items():
        sd = repr(s["sd"]) if s["sd_defined"] else "n/a (n < 2)"
        lines.append(
            f"| {key} | {s['n']} | {s['mean']!r} | {sd} | {s['min']!r} | {s['max']!r} |"
        )
    return lines


def render_report(analysis_dir: str) -> str:
    """Build the report text; raises MissingArtifactError naming absent inputs."""
    missing = [
        name
        for name in REQUIRED
        if not os.path.exists(os.path.join(analysis_dir, name))
    ]
    if missing:
        raise MissingArtifactError(missing)

    with open(os.path.join(analysis_dir, "summary.json"), encoding="utf-8") as f:
        summary = json.load(f)
    with open(
        os.path.join(analysis_dir, "histogram.csv"), encoding="utf-8", newline=""
    ) as f:
        hist_rows = list(csv.reader(f))[1:]

    lines = ["# Picking-system benchmark report", ""]

    lines.append("## Classifier accuracy")
    lines.append("")
    lines.append(
        "Measured pick accuracy (percent of attempts that succeed) per "
        "classifier, from fault-free severity-1 runs."
    )
    lines.append("")
    lines.extend(_stats_table(summary["accuracy"], "classifier"))
    lines.append("")

    lines.append("## System failure rates")
    lines.append("")
    lines.append(
        "Per-run hardware-fault rate (percent of pick attempts voided) for "
        "each benchmarked system at severity 1."
    )
    lines.append("")
    lines.extend(_stats_table(summary["failure"], "system"))
    lines.append("")

    lines.append("## Environmental severity impact")
    lines.append("")
    lines.append(
        "Performance score (completions normalized to the same seed at "
        "severity 1, times ten) per severity level."
    )
    lines.append("")
    lines.extend(_stats_table(summary["severity_scores"], "severity"))
    lines.append("")

    lines.append("## Fault-rate distribution")
    lines.append("")
    lines.append("| fault rate bin (%) | proposed | industry |")
    lines.append("| --- | --- | --- |")
    for row in hist_rows:
        if row[0] == "overflow":
            lines.append(f"| overflow | {row[2]} | {row[3]} |")
        else:
            lines.append(
                f"| [{float(row[0]):g}, {float(row[1]):g}) | {row[2]} | {row[3]} |"
            )
    lines.append("")

    lines.append("## Severity regression")
    lines.append("")
    reg = summary["regression"]
    if reg is None:
        lines.append("No regression available (insufficient severity spread).")
    else:
        lines.append(f"- slope: {reg['slope']!r} per severity level")
        lines.append(f"- intercept: {reg['intercept']!r}")
        lines.append(f"- r_squared: {reg['r_squared']!r}")
        lines.append(f"- fitted score at severity 1: {reg['fit_at_1']!r}")
        lines.append(f"- fitted score at severity 10: {reg['fit_at_10']!r}")
    sign = summary.get("sign_test")
    if sign is not None:
        lines.append(
            f"- degradation sign test at severity {sign['level']}: "
            f"{sign['degraded']}/{sign['n']} runs below baseline, "
            f"p = {sign['p_value']!r}"
        )
    lines.append("")

    lines.append("## Reference comparison")
    lines.append("")
    lines.append("| metric | reference | measured | tolerance | status |")
    lines.append("| --- | --- | --- | --- | --- |")
    for row in summary["comparison"]:
        measured = "absent" if row["measured"] is None else repr(row["measured"])
        badge = "PASS" if row["status"] == "pass" else "FAIL"
        lines.append(
            f"| {row['metric']} | {row['reference']!r} | {measured} "
            f"| {row['tolerance']} | {badge} |"
        )
    lines.append("")
    return "\n".join(lines)
