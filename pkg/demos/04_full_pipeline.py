"""
End-to-end benchmark pipeline
=============================

Drives the four CLI stages programmatically and prints the comparison table.
Equivalent shell session:

    wps train    --config configs/default.json --out pipeline_out
    wps simulate --config configs/default.json --qtable pipeline_out/qtable.json --out pipeline_out
    wps analyze  --runs pipeline_out/runs.csv --out pipeline_out
    wps report   --in pipeline_out --out pipeline_out/report.md

Takes about half a minute; artifacts land in ./pipeline_out.
"""
import csv
import os

from wps.cli import main

OUT = "pipeline_out"
CONFIG = "configs/default.json"

for argv in (
    ["train", "--config", CONFIG, "--out", OUT],
    ["simulate", "--config", CONFIG, "--qtable", f"{OUT}/qtable.json", "--out", OUT],
    ["analyze", "--runs", f"{OUT}/runs.csv", "--out", OUT],
    ["report", "--in", OUT, "--out", f"{OUT}/report.md"],
):
    print(f"$ wps {' '.join(argv)}")
    rc = main(argv)
    assert rc == 0, f"stage failed with exit code {rc}"

print("\nReference comparison")
print("=" * 72)
with open(os.path.join(OUT, "comparison.csv"), newline="") as f:
    for row in csv.DictReader(f):
        measured = row["measured"] or "absent"
        print(f"{row['status'].upper():4s} {row['metric']:28s} "
              f"reference {row['reference']:>8s} measured {float(measured):10.4f} "
              f"tol {row['tolerance']}")
print(f"\nfull report: {OUT}/report.md")
