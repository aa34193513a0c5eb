"""Command-line entry point: plot <kind> --in <glob> --out <path>."""

import argparse
import glob
import sys

from .render import RENDERERS
from .schemas import SchemaError


def expand(patterns):
    files = []
    for pattern in patterns:
        matches = sorted(glob.glob(pattern, recursive=True))
        if not matches:
            raise FileNotFoundError(f"no files match {pattern!r}")
        files.extend(matches)
    return files


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plot", description="Render a figure from levelwalk CSV output.")
    parser.add_argument("kind", choices=sorted(RENDERERS))
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="GLOB", help="input file glob (repeatable)")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        RENDERERS[args.kind](expand(args.inputs), args.out)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
