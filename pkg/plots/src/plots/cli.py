"""Command line entry point: render one figure kind from a directory of CSVs."""

import argparse
import sys
from pathlib import Path

from plots.figures import FIGURE_KINDS, KIND_INPUTS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="glmbplots",
        description="Render a tracker output figure from CSV files.",
    )
    parser.add_argument("kind", choices=FIGURE_KINDS, help="figure kind to render")
    parser.add_argument(
        "--input", default=".", help="directory holding the tracker CSV outputs"
    )
    parser.add_argument(
        "--output", default=None, help="image path to write (default fig_<kind>.png)"
    )
    args = parser.parse_args(argv)

    csv_path = Path(args.input) / KIND_INPUTS[args.kind]
    output = args.output if args.output is not None else f"fig_{args.kind}.png"
    spec = FigureSpec(inputs=(str(csv_path),), output=output, kind=args.kind)
    try:
        written = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(written)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
