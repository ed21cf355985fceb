"""One console entry point per figure type: --input <csv> --out <png>.

Exit codes: 0 rendered (validation warnings go to standard error),
2 schema violation or unreadable input.
"""

from __future__ import annotations

import argparse
import sys
import warnings

from .render import plot_kappa_curve, plot_modes, plot_projection
from .schema import AsymmetryWarning, SchemaError

__all__ = ["main_projection", "main_kappa", "main_modes"]


def _run(render, description, argv) -> int:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--input", required=True, help="exported CSV table")
    parser.add_argument("--out", required=True, help="output PNG path")
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AsymmetryWarning)
            written = render(args.input, args.out)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print(f"figure: {written}", file=sys.stderr)
    return 0


def main_projection(argv=None) -> int:
    return _run(plot_projection,
                "Render a two-frequency projection heatmap.", argv)


def main_kappa(argv=None) -> int:
    return _run(plot_kappa_curve,
                "Render a mode-count curve from a sweep table.", argv)


def main_modes(argv=None) -> int:
    return _run(plot_modes,
                "Render weighted mode curves and fraction bars from a "
                "fractions table and its sibling mode_*.csv files.", argv)
