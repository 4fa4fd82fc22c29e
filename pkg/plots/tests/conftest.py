import shutil
import subprocess
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
CONFIG = REPO_ROOT / "configs" / "default.json"


def run_wps(*args: str) -> None:
    exe = shutil.which("wps")
    cmd = [exe, *args] if exe else ["python3", "-m", "wps.cli", *args]
    subprocess.run(cmd, check=True, cwd=REPO_ROOT, capture_output=True, text=True)


@pytest.fixture(scope="session")
def artifacts_dir(tmp_path_factory) -> Path:
    """Default-config pipeline artifacts, produced through the wps CLI."""
    out = tmp_path_factory.mktemp("artifacts")
    run_wps("train", "--config", str(CONFIG), "--out", str(out))
    run_wps(
        "simulate",
        "--config", str(CONFIG),
        "--qtable", str(out / "qtable.json"),
        "--out", str(out),
    )
    run_wps("analyze", "--runs", str(out / "runs.csv"), "--out", str(out))
    return out
