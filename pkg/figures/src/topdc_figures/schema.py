"""Strict loaders for the exported tables.

The renderers never recompute physics; everything here only parses,
checks shape against the documented export schemas, and hands back
arrays.  Any deviation raises SchemaError with the offending path.
"""

from __future__ import annotations

import csv
import hashlib
import math
import warnings
from pathlib import Path

import numpy as np

__all__ = [
    "SchemaError",
    "AsymmetryWarning",
    "SYMMETRY_TOL",
    "sha256_file",
    "load_projection",
    "check_symmetry",
    "load_density",
    "load_sweep",
    "load_fractions",
    "load_modes",
    "discover_mode_files",
]

PROJECTION_HEADER = ["omega1", "omega2", "value"]
DENSITY_HEADER = ["omega1", "omega1_prime", "re", "im"]
SWEEP_HEADER = ["value", "schmidt_number", "error"]
FRACTIONS_HEADER = ["n", "r_n"]
MODE_HEADER = ["omega", "re_f", "im_f"]

# relative asymmetry beyond this is flagged as corrupted input
SYMMETRY_TOL = 1e-6


class SchemaError(ValueError):
    """Input table does not match the exported schema."""


class AsymmetryWarning(UserWarning):
    """Projection data is not symmetric under frequency exchange."""


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_rows(path, header):
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise SchemaError(f"{path}: {e}") from e
    if not rows:
        raise SchemaError(f"{path}: empty file")
    if rows[0] != header:
        raise SchemaError(f"{path}: header {rows[0]!r}, expected {header!r}")
    return path, rows[1:]


def _numeric(path, rows, n_cols) -> np.ndarray:
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out = np.empty((len(rows), n_cols))
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise SchemaError(f"{path}: row {i + 1} has {len(row)} cells, "
                              f"expected {n_cols}")
        try:
            out[i] = [float(c) for c in row]
        except ValueError:
            raise SchemaError(f"{path}: row {i + 1} is not numeric: {row!r}") from None
    if not np.all(np.isfinite(out)):
        raise SchemaError(f"{path}: non-finite entries")
    return out


def _square_axis(path, flat_axis_rows, flat_axis_cols):
    count = flat_axis_rows.size
    n = math.isqrt(count)
    if n * n != count or n < 2:
        raise SchemaError(f"{path}: {count} rows do not form a square grid")
    rows_axis = flat_axis_rows.reshape(n, n)
    cols_axis = flat_axis_cols.reshape(n, n)
    axis = rows_axis[:, 0]
    if not (np.all(rows_axis == axis[:, None]) and np.all(cols_axis == axis[None, :])):
        raise SchemaError(f"{path}: grid axes are not a row-major product")
    if not np.all(np.diff(axis) > 0.0):
        raise SchemaError(f"{path}: frequency axis is not strictly increasing")
    return n, axis


def load_projection(path):
    """omega1,omega2,value rows -> (axis, n x n matrix)."""
    path, rows = _read_rows(path, PROJECTION_HEADER)
    data = _numeric(path, rows, 3)
    n, axis = _square_axis(path, data[:, 0], data[:, 1])
    return axis, data[:, 2].reshape(n, n)


def check_symmetry(matrix: np.ndarray) -> float:
    """Relative asymmetry of a projection; warns beyond SYMMETRY_TOL."""
    peak = float(np.max(np.abs(matrix)))
    if peak == 0.0:
        return 0.0
    asym = float(np.max(np.abs(matrix - matrix.T))) / peak
    if asym > SYMMETRY_TOL:
        warnings.warn(
            AsymmetryWarning(
                f"projection asymmetric at relative level {asym:.3e} "
                f"(tolerance {SYMMETRY_TOL:g}); input may be corrupted"
            ),
            stacklevel=2,
        )
    return asym


def load_density(path):
    """omega1,omega1_prime,re,im rows -> (axis, complex n x n matrix)."""
    path, rows = _read_rows(path, DENSITY_HEADER)
    data = _numeric(path, rows, 4)
    n, axis = _square_axis(path, data[:, 0], data[:, 1])
    return axis, (data[:, 2] + 1j * data[:, 3]).reshape(n, n)


def load_sweep(path):
    """Sweep table -> (values, mode counts), error rows skipped."""
    path, rows = _read_rows(path, SWEEP_HEADER)
    xs, ys = [], []
    for i, row in enumerate(rows):
        if len(row) != 3:
            raise SchemaError(f"{path}: row {i + 1} has {len(row)} cells, expected 3")
        if row[2] != "" or row[1] == "":
            continue
        try:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
        except ValueError:
            raise SchemaError(f"{path}: row {i + 1} is not numeric: {row!r}") from None
    if not xs:
        raise SchemaError(f"{path}: no usable rows (all failed or empty)")
    return np.asarray(xs), np.asarray(ys)


def load_fractions(path) -> np.ndarray:
    path, rows = _read_rows(path, FRACTIONS_HEADER)
    data = _numeric(path, rows, 2)
    if not np.array_equal(data[:, 0], np.arange(len(rows))):
        raise SchemaError(f"{path}: mode indices are not 0..{len(rows) - 1}")
    if np.any(data[:, 1] < -1e-12):
        raise SchemaError(f"{path}: negative mode fraction")
    return data[:, 1]


def load_modes(paths):
    """Mode files -> (shared omega axis, list of complex amplitudes)."""
    if not paths:
        raise SchemaError("no mode files given")
    axis = None
    columns = []
    for p in paths:
        path, rows = _read_rows(p, MODE_HEADER)
        data = _numeric(path, rows, 3)
        if axis is None:
            axis = data[:, 0]
            if not np.all(np.diff(axis) > 0.0):
                raise SchemaError(f"{path}: frequency axis is not strictly increasing")
        elif not np.array_equal(axis, data[:, 0]):
            raise SchemaError(f"{path}: frequency axis differs from the first file")
        columns.append(data[:, 1] + 1j * data[:, 2])
    return axis, columns


def discover_mode_files(fractions_path) -> list:
    """mode_*.csv exported next to a fractions table, in index order."""
    return sorted(Path(fractions_path).parent.glob("mode_[0-9][0-9][0-9].csv"))
