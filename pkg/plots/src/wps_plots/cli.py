"""render_figures: batch-render benchmark figures from an analysis directory.

Exit codes: 0 success, 1 schema/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .figures import FIGURE_IDS, SchemaError, default_spec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="render_figures",
        description="Render benchmark figures from wps pipeline artifacts.",
    )
    p.add_argument("--in", dest="analysis_dir", required=True,
                   help="directory holding the pipeline CSV artifacts")
    p.add_argument("--out", dest="out_dir", required=True,
                   help="directory to write images into")
    p.add_argument("--only", choices=FIGURE_IDS, default=None,
                   help="render a single figure instead of all five")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    ids = [args.only] if args.only else list(FIGURE_IDS)
    try:
        for figure_id in ids:
            path = render(default_spec(figure_id, args.analysis_dir, args.out_dir))
            print(f"wrote {path}")
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
