"""Command line: ``figplots <kind> --csv PATH... --out PATH [--log-y] [--log-x]``."""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render visibility-series CSVs as figure panels.")
    parser.add_argument("kind", choices=sorted(KINDS), help="figure kind")
    parser.add_argument("--csv", nargs="+", required=True, metavar="PATH",
                        help="input series CSV file(s)")
    parser.add_argument("--out", required=True, metavar="PATH",
                        help="output PNG path")
    parser.add_argument("--log-y", action="store_true", help="logarithmic y axis")
    parser.add_argument("--log-x", action="store_true", help="logarithmic x axis")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, csv_paths=tuple(args.csv), out_path=args.out,
                      log_y=args.log_y, log_x=args.log_x)
    try:
        result = render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
