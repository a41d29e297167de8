"""Command line: one flag per figure type, one image per invocation."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import (FigureInputError, Series, read_association,
                 read_scenario_geometry, read_trace, read_trajectory)
from .render import (build_association_figure, build_trace_figure,
                     build_trajectory_figure, save_figure)


def _labeled(raw: str) -> tuple[str, Path]:
    """Split LABEL=PATH; a bare path is labeled by its parent directory."""
    label, sep, path = raw.partition("=")
    if sep and label and not Path(label).exists():
        return label, Path(path)
    p = Path(raw)
    return p.resolve().parent.name or p.stem, p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secuav-figures",
        description="Render plan output files into figures.")
    kind = parser.add_mutually_exclusive_group(required=True)
    kind.add_argument("--trace", nargs="+", metavar="[LABEL=]CSV",
                      help="convergence trace file(s)")
    kind.add_argument("--association", nargs="+", metavar="[LABEL=]CSV",
                      help="schedule file(s), one panel each")
    kind.add_argument("--trajectory", nargs="+", metavar="[LABEL=]CSV",
                      help="waypoint file(s), overlaid on one map")
    parser.add_argument("--scenario", metavar="SCN",
                        help="scenario file for user/Eve/start markers "
                             "(required with --trajectory)")
    parser.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path (.png, .pdf, .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.trace:
            series = [Series(lbl, read_trace(p))
                      for lbl, p in map(_labeled, args.trace)]
            fig = build_trace_figure(series)
        elif args.association:
            series = [Series(lbl, read_association(p))
                      for lbl, p in map(_labeled, args.association)]
            fig = build_association_figure(series)
        else:
            if not args.scenario:
                print("error: --trajectory requires --scenario for markers",
                      file=sys.stderr)
                return 1
            series = [Series(lbl, read_trajectory(p))
                      for lbl, p in map(_labeled, args.trajectory)]
            fig = build_trajectory_figure(
                series, read_scenario_geometry(args.scenario))
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    save_figure(fig, args.out)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
