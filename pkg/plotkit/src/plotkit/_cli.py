"""Shared command-line plumbing for the figure scripts."""

from __future__ import annotations

import argparse
import sys

from .figspec import FORMATS, FigureSpec
from .render import render
from .report import ReportError


def build_parser(prog: str, description: str, multi: bool,
                 with_rate: bool = False) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=prog, description=description)
    p.add_argument("--report", action="append", required=True,
                   metavar="SUMMARY_JSON",
                   help="summary JSON written by the montecarlo run"
                        + ("; repeat for each sweep point" if multi else ""))
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--format", choices=FORMATS, default="png")
    p.add_argument("--title", default="")
    if with_rate:
        p.add_argument("--rate", type=float, default=None,
                       help="rescaling exponent (default: magnitude of the "
                            "reported slope)")
    return p


def run(kind: str, args: argparse.Namespace) -> int:
    try:
        spec = FigureSpec(kind=kind, reports=tuple(args.report),
                          out=args.out, fmt=args.format, title=args.title,
                          rate=getattr(args, "rate", None))
        render(spec)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
