#!/usr/bin/env python3
"""Regenerate the golden CSVs and golden figures used by the plots tests.

Runs the tracker once on the default scenario with a fixed seed, writes the
four CSV outputs into plots/tests/golden/, then renders the four figure kinds
from those CSVs into the same directory. Both steps are deterministic, so
reruns reproduce the committed files byte for byte.
"""

import argparse
from pathlib import Path

from glmbtrack.config import FilterConfig, MdbConfig, RunConfig
from glmbtrack.pipeline import run_experiment

from plots.figures import FIGURE_KINDS, KIND_INPUTS, FigureSpec, render


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--output",
        default=str(Path(__file__).resolve().parent.parent / "plots" / "tests" / "golden"),
        help="directory to write golden CSVs and images into",
    )
    args = parser.parse_args()
    out_dir = Path(args.output)

    config = RunConfig(
        seed=1,
        runs=1,
        filter=FilterConfig(particles_per_track=500),
        birth=MdbConfig(particles_per_birth=1000),
    )
    report = run_experiment(config, out_dir=str(out_dir))
    for name, path in sorted(report.files.items()):
        print(f"wrote {path}")

    for kind in FIGURE_KINDS:
        spec = FigureSpec(
            inputs=(str(out_dir / KIND_INPUTS[kind]),),
            output=str(out_dir / f"fig_{kind}.png"),
            kind=kind,
        )
        print(f"wrote {render(spec)}")


if __name__ == "__main__":
    main()
