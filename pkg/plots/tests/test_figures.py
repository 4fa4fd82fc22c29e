import csv
import hashlib
import shutil

import pytest

from wps_plots import FIGURE_IDS, FigureSpec, SchemaError, build_figure, default_spec, render
from wps_plots.cli import main as cli_main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _hash_tree(paths):
    return {p: hashlib.sha256(p.read_bytes()).hexdigest() for p in paths}


def test_all_five_figures_render(artifacts_dir, tmp_path):
    inputs = sorted(artifacts_dir.glob("*.csv"))
    before = _hash_tree(inputs)
    for figure_id in FIGURE_IDS:
        out = render(default_spec(figure_id, str(artifacts_dir), str(tmp_path)))
        data = open(out, "rb").read()
        assert data.startswith(PNG_MAGIC) and len(data) > 1000, figure_id
    assert _hash_tree(inputs) == before  # rendering never touches the inputs
    assert len(FIGURE_IDS) == 5


def test_f6_line_parameters_equal_regression_csv(artifacts_dir):
    with open(artifacts_dir / "regression.csv", newline="") as f:
        row = next(csv.DictReader(f))
    slope, intercept = float(row["slope"]), float(row["intercept"])

    fig = build_figure(default_spec("f6_regression", str(artifacts_dir), "."))
    try:
        fit_lines = [
            line
            for ax in fig.axes
            for line in ax.get_lines()
            if (line.get_gid() or "").startswith("fit;")
        ]
        assert len(fit_lines) == 1
        gid = fit_lines[0].get_gid()
        parts = dict(kv.split("=") for kv in gid.split(";")[1:])
        assert float(parts["slope"]) == slope  # exact equality
        assert float(parts["intercept"]) == intercept
        # and the drawn endpoints sit exactly on that line
        xs, ys = fit_lines[0].get_data()
        for x, y in zip(xs, ys):
            assert y == intercept + slope * x
    finally:
        import matplotlib.pyplot as plt

        plt.close(fig)


def test_flat_zero_surface_renders(tmp_path):
    path = tmp_path / "qsurface_pick.csv"
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["x", "y", "q"])
        for y in range(3):
            for x in range(3):
                w.writerow([x, y, "0.0"])
    spec = FigureSpec(
        "f2_surface", {"qsurface": str(path)}, str(tmp_path / "flat.png")
    )
    out = render(spec)
    assert open(out, "rb").read().startswith(PNG_MAGIC)


def test_missing_column_names_column_and_figure(artifacts_dir, tmp_path):
    # strip accuracy_pct out of a copy of runs.csv
    src = artifacts_dir / "runs.csv"
    broken = tmp_path / "runs.csv"
    with open(src, newline="") as f:
        rows = list(csv.DictReader(f))
    keep = [c for c in rows[0] if c != "accuracy_pct"]
    with open(broken, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=keep, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    spec = FigureSpec(
        "f4_accuracy", {"runs": str(broken)}, str(tmp_path / "x.png")
    )
    with pytest.raises(SchemaError, match="f4_accuracy") as err:
        build_figure(spec)
    assert "accuracy_pct" in str(err.value)


def test_cli_renders_all_and_single(artifacts_dir, tmp_path):
    out = tmp_path / "figs"
    assert cli_main(["--in", str(artifacts_dir), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.glob("*.png")) == sorted(
        f"{fid}.png" for fid in FIGURE_IDS
    )
    only = tmp_path / "one"
    assert cli_main(
        ["--in", str(artifacts_dir), "--out", str(only), "--only", "f6_regression"]
    ) == 0
    assert [p.name for p in only.glob("*.png")] == ["f6_regression.png"]


def test_cli_schema_error_exit_code(artifacts_dir, tmp_path, capsys):
    # analysis dir missing regression.csv entirely -> I/O error (2)
    partial = tmp_path / "partial"
    partial.mkdir()
    shutil.copy(artifacts_dir / "runs.csv", partial / "runs.csv")
    rc = cli_main(["--in", str(partial), "--out", str(tmp_path / "o"),
                   "--only", "f6_regression"])
    assert rc == 2

    # header present but wrong columns -> schema error (1)
    bad = tmp_path / "bad"
    bad.mkdir()
    (bad / "qsurface_pick.csv").write_text("a,b,c\n1,2,3\n")
    rc = cli_main(["--in", str(bad), "--out", str(tmp_path / "o2"),
                   "--only", "f2_surface"])
    assert rc == 1
    assert "f2_surface" in capsys.readouterr().err
