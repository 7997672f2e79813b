"""Command-line entry: render quantile-band or single-fit figures."""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import FigureSpec, render_fit_figure, render_quantile_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcfigures")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quantile", help="render quantile-band panels from CSVs")
    q.add_argument("csv", nargs="+", help="quantile CSV files, one figure row each")
    q.add_argument("--labels", nargs="*", default=None)
    q.add_argument("--family", required=True)
    q.add_argument("--params", nargs="*", type=float, default=[])
    q.add_argument("--gammas", nargs="*", type=float, default=None)
    q.add_argument("--out", required=True)

    f = sub.add_parser("fit", help="render a single fit with rug marks")
    f.add_argument("fit", help="fit file from the estimation CLI")
    f.add_argument("sample", help="sample file (one real per line)")
    f.add_argument("--family", required=True)
    f.add_argument("--params", nargs="*", type=float, default=[])
    f.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "quantile":
            labels = args.labels or [f"row {i + 1}" for i in range(len(args.csv))]
            if len(labels) != len(args.csv):
                print("error: --labels must match the number of CSVs", file=sys.stderr)
                return 1
            spec = FigureSpec(
                csv_paths=tuple(zip(labels, args.csv)), family=args.family,
                params=tuple(args.params), out_path=args.out,
                gammas=tuple(args.gammas) if args.gammas is not None else None,
            )
            render_quantile_figure(spec)
        else:
            spec = FigureSpec(csv_paths=(), family=args.family,
                              params=tuple(args.params), out_path=args.out)
            render_fit_figure(args.fit, args.sample, spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"figure written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
