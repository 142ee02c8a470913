"""Command line entry point: `figs render --figure figN --input DIR --out PATH`."""

from __future__ import annotations

import argparse
import sys

from .render import render
from .specs import FIGURES_HELP, EmptyDataError, MissingColumnError


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="figs", description="Render bwpc result CSVs into figures")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help=FIGURES_HELP)
    p.add_argument("--figure", required=True, choices=("fig3", "fig4", "fig5", "fig6", "fig7"))
    p.add_argument("--input", required=True, help="directory holding the figure's CSV")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--format", default="svg", choices=("svg", "png"))
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        path = render(ns.figure, ns.input, ns.out, ns.format)
    except (MissingColumnError, EmptyDataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
