"""Deterministic figure rendering from exported tables.

Fixed 200 dpi, fixed colormap, headless backend, and the sha256 of
every input embedded in the PNG text metadata, so a regenerated figure
is a clean diff against the previous one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first
import numpy as np  # noqa: E402

from .schema import (  # noqa: E402
    SchemaError,
    check_symmetry,
    discover_mode_files,
    load_density,
    load_fractions,
    load_modes,
    load_projection,
    load_sweep,
    sha256_file,
)

__all__ = [
    "DPI",
    "CMAP",
    "PlotSpec",
    "plot_projection",
    "plot_density",
    "plot_kappa_curve",
    "plot_modes",
    "render_run_dir",
    "render_sweep_dir",
]

DPI = 200
CMAP = "viridis"
AXIS_UNIT = 1e14
AXIS_LABEL = r"$10^{14}$ rad/s"
KINDS = ("heatmap2d", "curve", "mode_bars")

N_MODE_CURVES = 4


@dataclass(frozen=True)
class PlotSpec:
    """What to draw, from which files, to where."""

    input_paths: tuple
    kind: str
    xlabel: str
    ylabel: str
    out_path: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}")
        for p in self.input_paths:
            if not Path(p).is_file():
                raise SchemaError(f"input does not exist: {p}")


def _save(fig, spec: PlotSpec) -> Path:
    out = Path(spec.out_path)
    stamps = " ".join(f"{Path(p).name}={sha256_file(p)}" for p in spec.input_paths)
    fig.savefig(out, dpi=DPI, metadata={"input-checksums": stamps})
    plt.close(fig)
    return out


def _heatmap(spec: PlotSpec, axis, matrix, title) -> Path:
    scaled = axis / AXIS_UNIT
    fig, ax = plt.subplots(figsize=(4.8, 4.0), constrained_layout=True)
    im = ax.imshow(matrix, origin="lower", cmap=CMAP,
                   extent=(scaled[0], scaled[-1], scaled[0], scaled[-1]))
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.set_title(title)
    return _save(fig, spec)


def plot_projection(s_csv, out_png) -> Path:
    """Two-frequency projection as a square heatmap."""
    spec = PlotSpec((s_csv,), "heatmap2d",
                    rf"$\omega_1$ ({AXIS_LABEL})", rf"$\omega_2$ ({AXIS_LABEL})",
                    Path(out_png))
    axis, matrix = load_projection(s_csv)
    check_symmetry(matrix)
    return _heatmap(spec, axis, matrix, r"$s(\omega_1, \omega_2)$")


def plot_density(rho_csv, out_png) -> Path:
    """Magnitude of the reduced density matrix as a heatmap."""
    spec = PlotSpec((rho_csv,), "heatmap2d",
                    rf"$\omega$ ({AXIS_LABEL})", rf"$\omega'$ ({AXIS_LABEL})",
                    Path(out_png))
    axis, matrix = load_density(rho_csv)
    return _heatmap(spec, axis, np.abs(matrix), r"$|\rho(\omega, \omega')|$")


def plot_kappa_curve(table_csv, out_png, xlabel="parameter value") -> Path:
    """Mode count against a swept parameter, minimum marked."""
    spec = PlotSpec((table_csv,), "curve", xlabel, "effective mode count",
                    Path(out_png))
    xs, ys = load_sweep(table_csv)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]

    fig, ax = plt.subplots(figsize=(4.8, 3.4), constrained_layout=True)
    ax.plot(xs, ys, marker="o", markersize=4, linewidth=1.2, color="#31688e")
    if np.all(xs > 0.0):
        ax.set_xscale("log")
    best = int(np.argmin(ys))
    ax.plot(xs[best], ys[best], marker="v", markersize=9, color="#b5367a",
            linestyle="none")
    ax.annotate(f"min {ys[best]:.4g}", (xs[best], ys[best]),
                textcoords="offset points", xytext=(6, 8), fontsize=8)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, spec)


def plot_modes(fractions_csv, out_png, mode_csvs=None) -> Path:
    """Fraction-weighted dominant modes next to the fraction bars."""
    modes = ([Path(p) for p in mode_csvs] if mode_csvs is not None
             else discover_mode_files(fractions_csv))
    if not modes:
        raise SchemaError(f"no mode_*.csv next to {fractions_csv}")
    spec = PlotSpec((Path(fractions_csv), *modes), "mode_bars",
                    rf"$\omega$ ({AXIS_LABEL})", "weighted amplitude",
                    Path(out_png))
    fractions = load_fractions(fractions_csv)
    axis, columns = load_modes(modes)

    fig, (left, right) = plt.subplots(
        1, 2, figsize=(7.6, 3.2), width_ratios=(1.6, 1.0), constrained_layout=True)
    scaled = axis / AXIS_UNIT
    shown = min(N_MODE_CURVES, len(columns), len(fractions))
    for m in range(shown):
        left.plot(scaled, fractions[m] * np.abs(columns[m]),
                  linewidth=1.1, label=f"n={m}")
    left.set_xlabel(spec.xlabel)
    left.set_ylabel(spec.ylabel)
    left.legend(fontsize=8)

    bars = min(len(fractions), 10)
    right.bar(np.arange(bars), fractions[:bars], color="#31688e")
    right.set_xlabel("mode index")
    right.set_ylabel("fraction")
    right.set_ylim(0.0, 1.0)
    return _save(fig, spec)


def render_run_dir(run_dir) -> list:
    """All figures for one run export; returns the written paths."""
    run_dir = Path(run_dir)
    return [
        plot_projection(run_dir / "projection.csv", run_dir / "projection.png"),
        plot_density(run_dir / "rho.csv", run_dir / "rho.png"),
        plot_modes(run_dir / "fractions.csv", run_dir / "modes.png"),
    ]


def render_sweep_dir(sweep_dir) -> list:
    run_dir = Path(sweep_dir)
    xlabel = "parameter value"
    meta = run_dir / "sweep_metadata.json"
    if meta.is_file():
        try:
            xlabel = str(json.loads(meta.read_text())["parameter"])
        except (ValueError, KeyError):
            pass  # cosmetic only, never block rendering on it
    return [plot_kappa_curve(run_dir / "sweep.csv", run_dir / "sweep.png",
                             xlabel=xlabel)]
