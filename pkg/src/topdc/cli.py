"""Command line front end.

Subcommands: ``run`` (single configuration, full exports), ``sweep``
(parameter scan to a delimited table), ``presets`` (list or show the
bundled configurations).  Human-readable progress goes to standard
error; data only ever goes to files, except ``presets`` output which is
the command's purpose and prints to standard output.

Exit codes: 0 success, 2 configuration error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import SWEEP_PARAMETERS, RunConfig, WORKERS_ENV
from .errors import ConfigError, TopdcError
from .pipeline import (
    run as run_pipeline,
    sweep_pulse_duration,
    sweep_pump_bandwidth,
    sweep_pump_wavelength,
    write_sweep,
)
from .presets import load_preset, load_preset_dict, preset_names

__all__ = ["main"]


def _log(msg: str):
    print(msg, file=sys.stderr)


def _load_config(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("config", "give either --config or --preset, not both")
    if args.preset:
        return load_preset(args.preset)
    if args.config:
        return RunConfig.from_file(args.config)
    raise ConfigError("config", "one of --config or --preset is required")


def _render_figures(out_dir: Path, kind: str):
    """Best effort: only when the figure package is installed."""
    try:
        import topdc_figures
    except ImportError:
        _log("figure rendering needs the topdc-figures package; skipping")
        return
    if kind == "run":
        written = topdc_figures.render_run_dir(out_dir)
    else:
        written = topdc_figures.render_sweep_dir(out_dir)
    for path in written:
        _log(f"figure: {path}")


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out) if args.out else Path(cfg.output_dir)
    summary = run_pipeline(cfg, out_dir=out)
    _log(f"run complete: schmidt_number={summary.schmidt_number:.6g} "
         f"concurrence={summary.concurrence:.6g} "
         f"triplet_probability={summary.triplet_probability:.6g}")
    _log(f"wrote {len(summary.files) + 1} files to {out}")
    if args.figures:
        _render_figures(out, "run")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    param = args.param or (cfg.sweep.parameter if cfg.sweep else None)
    if param is None:
        raise ConfigError("sweep", "no --param given and no sweep section in the config")
    if args.values:
        try:
            values = [float(tok) for tok in args.values.split(",") if tok.strip()]
        except ValueError:
            raise ConfigError("sweep.values", f"not a comma-separated number list: "
                              f"{args.values!r}") from None
        if not values:
            raise ConfigError("sweep.values", "no values given")
    elif cfg.sweep is not None and cfg.sweep.parameter == param:
        values = list(cfg.sweep.values)
    else:
        raise ConfigError("sweep", "no --values given and no matching sweep section")

    if param == "pump_sigma":
        rows = sweep_pump_bandwidth(cfg, values)
    elif param == "pump_lambda":
        rows = sweep_pump_wavelength(cfg, values)
    elif param == "pulse_duration":
        rows = sweep_pulse_duration(cfg, values)
    else:
        raise ConfigError("sweep.parameter",
                          f"expected one of {SWEEP_PARAMETERS}, got {param!r}")

    out = Path(args.out) if args.out else Path(cfg.output_dir)
    table = write_sweep(out, cfg, param, rows)
    failed = sum(1 for r in rows if r.error)
    _log(f"sweep complete: {len(rows)} points, {failed} failed -> {table}")
    if args.figures:
        _render_figures(out, "sweep")
    return 0


def _cmd_presets(args) -> int:
    if args.action == "list":
        for name in preset_names():
            print(name)
        return 0
    if not args.name:
        raise ConfigError("preset", "presets show requires a name")
    print(json.dumps(load_preset_dict(args.name), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topdc",
        description="Triphoton spectral modeling: build sources, quantify "
                    "mode structure, optimize detection.",
        epilog=f"Worker count for sweeps: config 'workers', else ${WORKERS_ENV}, "
               "else all cores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    com = sub.add_parser("run", help="execute one configuration and export everything")
    com.add_argument("--config", help="path to a JSON run configuration")
    com.add_argument("--preset", help="name of a bundled configuration")
    com.add_argument("--out", help="output directory (default: config output_dir)")
    com.add_argument("--figures", action="store_true",
                     help="also render figures if the topdc-figures package is installed")
    com.set_defaults(func=_cmd_run)

    com = sub.add_parser("sweep", help="scan one parameter, write a delimited table")
    com.add_argument("--config", help="path to a JSON run configuration")
    com.add_argument("--preset", help="name of a bundled configuration")
    com.add_argument("--param", choices=SWEEP_PARAMETERS,
                     help="pump_sigma: ratio to the phase-matched bandwidth; "
                          "pump_lambda: meters; pulse_duration: seconds")
    com.add_argument("--values", help="comma-separated parameter values")
    com.add_argument("--out", help="output directory (default: config output_dir)")
    com.add_argument("--figures", action="store_true",
                     help="also render figures if the topdc-figures package is installed")
    com.set_defaults(func=_cmd_sweep)

    com = sub.add_parser("presets", help="list or show bundled configurations")
    com.add_argument("action", choices=("list", "show"))
    com.add_argument("name", nargs="?", help="preset name (for show)")
    com.set_defaults(func=_cmd_presets)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        _log(f"configuration error: {e}")
        return 2
    except (TopdcError, ValueError) as e:
        _log(f"numeric error: {type(e).__name__}: {e}")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
