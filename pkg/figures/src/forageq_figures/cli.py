"""Command-line entry point: render every chart for a results tree."""

from __future__ import annotations

import argparse
import sys

from .charts import plot_all
from .loader import SchemaError


def cli(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="forageq-figures",
        description="Render summary charts from run stats CSVs.")
    parser.add_argument("--results", required=True,
                        help="directory tree containing stats.csv files")
    parser.add_argument("--out", required=True,
                        help="directory to write PNG charts into")
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return int(stop.code or 0)

    try:
        paths = plot_all(args.results, args.out)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


def entry() -> None:
    raise SystemExit(cli())


if __name__ == "__main__":
    entry()
