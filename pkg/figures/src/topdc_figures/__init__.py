"""Figure regeneration for exported triphoton tables."""

from .render import (
    CMAP,
    DPI,
    PlotSpec,
    plot_density,
    plot_kappa_curve,
    plot_modes,
    plot_projection,
    render_run_dir,
    render_sweep_dir,
)
from .schema import (
    SYMMETRY_TOL,
    AsymmetryWarning,
    SchemaError,
    check_symmetry,
    sha256_file,
)

__all__ = [
    "CMAP",
    "DPI",
    "PlotSpec",
    "plot_density",
    "plot_kappa_curve",
    "plot_modes",
    "plot_projection",
    "render_run_dir",
    "render_sweep_dir",
    "SYMMETRY_TOL",
    "AsymmetryWarning",
    "SchemaError",
    "check_symmetry",
    "sha256_file",
]
