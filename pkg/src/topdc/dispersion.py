"""Material dispersion models and phase-mismatch machinery.

Three interchangeable wavenumber models: Sellmeier glasses loaded from
versioned JSON data files, quadratic Taylor expansions around a reference
frequency, and tabulated effective-index data.  All of them expose
``wavenumber(omega)`` in SI units (rad/s in, 1/m out).

The mismatch for triplet generation pumped at the sum frequency is

    mismatch(w1, w2, w3) = k_pump(w1 + w2 + w3) - k_t(w1) - k_t(w2) - k_t(w3)

which every routine here treats as a single symmetric function of the
three arguments.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (
    InvalidLength,
    NoSignChange,
    OutOfRange,
    ZeroDispersion,
)
from .grids import FrequencyGrid, interp_linear, triple_sum

__all__ = [
    "C_VACUUM",
    "SellmeierMaterial",
    "fused_silica",
    "geo2_glass",
    "geo2_doped_silica",
    "SellmeierDispersion",
    "TaylorDispersion",
    "TabulatedDispersion",
    "inv_group_velocity",
    "gvd",
    "phase_mismatch",
    "mismatch_on_grid",
    "MismatchQuadric",
    "mismatch_quadric",
    "phase_matching_bandwidth",
    "PhaseMatchingPoint",
    "find_degenerate_phase_matching",
]

# speed of light, exact by definition
C_VACUUM = 299_792_458.0

# default finite-difference step for group quantities, rad/s
FD_STEP = 1e11


@dataclass(frozen=True)
class SellmeierMaterial:
    """Three-term Sellmeier glass: n^2 = 1 + sum b_i lam^2 / (lam^2 - l_i).

    Wavelengths in micrometers, l_i in micrometers squared.  Coefficient
    sets ship as JSON data files carrying their literature citation.
    """

    name: str
    b: tuple
    l_um2: tuple
    valid_um: tuple
    citation: str

    @classmethod
    def from_mapping(cls, d) -> "SellmeierMaterial":
        return cls(
            name=d["name"],
            b=tuple(d["b"]),
            l_um2=tuple(d["l_um2"]),
            valid_um=tuple(d["valid_um"]),
            citation=d["citation"],
        )

    def index(self, lam_um):
        """Refractive index at vacuum wavelength lam_um (scalar or array)."""
        lam = np.asarray(lam_um, dtype=float)
        if np.any(lam < self.valid_um[0]) or np.any(lam > self.valid_um[1]):
            raise OutOfRange(
                f"{self.name}: wavelength outside validity range {self.valid_um} um"
            )
        l2 = lam**2
        acc = 1.0
        for bi, li in zip(self.b, self.l_um2):
            acc = acc + bi * l2 / (l2 - li)
        n = np.sqrt(acc)
        return float(n) if np.isscalar(lam_um) else n


def _load_material(fname: str) -> SellmeierMaterial:
    path = resources.files("topdc.data.materials").joinpath(fname)
    return SellmeierMaterial.from_mapping(json.loads(path.read_text()))


def fused_silica() -> SellmeierMaterial:
    return _load_material("silica_malitson_1965.json")


def geo2_glass() -> SellmeierMaterial:
    return _load_material("geo2_fleming_1984.json")


def geo2_doped_silica(molar_fraction: float) -> SellmeierMaterial:
    """GeO2-doped silica by linear interpolation between the end members.

    Oscillator strengths and resonance wavelengths (not their squares)
    interpolate linearly in the GeO2 molar fraction, following the
    prescription in the germania data file's citation.
    """
    if not 0.0 <= molar_fraction <= 1.0:
        raise ValueError("molar fraction must lie in [0, 1]")
    si = fused_silica()
    ge = geo2_glass()
    x = molar_fraction
    b = tuple(bs + x * (bg - bs) for bs, bg in zip(si.b, ge.b))
    lam = tuple(
        (ls**0.5 + x * (lg**0.5 - ls**0.5)) ** 2
        for ls, lg in zip(si.l_um2, ge.l_um2)
    )
    valid = (max(si.valid_um[0], ge.valid_um[0]), min(si.valid_um[1], ge.valid_um[1]))
    return SellmeierMaterial(
        name=f"GeO2-doped silica (x={x:g})",
        b=b,
        l_um2=lam,
        valid_um=valid,
        citation=f"interpolated: [{si.citation}] and [{ge.citation}]",
    )


class SellmeierDispersion:
    """Bulk wavenumber k(omega) = n(lam) * omega / c for a Sellmeier glass."""

    def __init__(self, material: SellmeierMaterial):
        self.material = material

    def wavenumber(self, omega):
        w = np.asarray(omega, dtype=float)
        lam_um = 2.0 * np.pi * C_VACUUM / w * 1e6
        n = self.material.index(lam_um)
        k = n * w / C_VACUUM
        return float(k) if np.isscalar(omega) else k


@dataclass(frozen=True)
class TaylorDispersion:
    """Quadratic expansion k(w) = k0 + (w - w0)/v + (gvd/2)(w - w0)^2.

    ``inv_group_velocity`` is 1/v in s/m and ``gvd_s2_per_m`` the
    second-order coefficient in s^2/m (1 fs^2/mm = 1e-27 s^2/m).
    """

    center_omega: float
    k0: float
    inv_group_velocity: float
    gvd_s2_per_m: float

    def wavenumber(self, omega):
        d = np.asarray(omega, dtype=float) - self.center_omega
        k = self.k0 + self.inv_group_velocity * d + 0.5 * self.gvd_s2_per_m * d * d
        return float(k) if np.isscalar(omega) else k


class TabulatedDispersion:
    """Effective index sampled on a frequency table; linear interpolation.

    The table must hold at least 16 strictly increasing frequencies.
    Queries outside the table are a hard error, never extrapolated.
    """

    MIN_ROWS = 16

    def __init__(self, omegas, n_eff):
        omegas = np.asarray(omegas, dtype=float)
        n_eff = np.asarray(n_eff, dtype=float)
        if omegas.size < self.MIN_ROWS:
            raise ValueError(f"need at least {self.MIN_ROWS} table rows")
        if np.any(np.diff(omegas) <= 0):
            raise ValueError("table frequencies must be strictly increasing")
        self.omegas = omegas
        self.n_eff = n_eff

    @classmethod
    def from_csv(cls, path) -> "TabulatedDispersion":
        omegas, n_eff = [], []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != [
                "omega_rad_s",
                "n_eff",
            ]:
                raise ValueError("expected CSV header 'omega_rad_s,n_eff'")
            for row in reader:
                omegas.append(float(row["omega_rad_s"]))
                n_eff.append(float(row["n_eff"]))
        return cls(omegas, n_eff)

    def wavenumber(self, omega):
        n = interp_linear(self.omegas, self.n_eff, omega)
        k = n * np.asarray(omega, dtype=float) / C_VACUUM
        return float(k) if np.isscalar(omega) else k

    @property
    def table_step(self) -> float:
        return float(np.min(np.diff(self.omegas)))


def _fd_step_for(model) -> float:
    if isinstance(model, TabulatedDispersion):
        return model.table_step
    return FD_STEP


def inv_group_velocity(model, omega: float, step: float | None = None) -> float:
    """First derivative dk/domega, exact for Taylor models.

    Central differences with the default step (or one table spacing for
    tabulated models); callers near a table edge should pass their own
    step.
    """
    if isinstance(model, TaylorDispersion):
        return model.inv_group_velocity + model.gvd_s2_per_m * (omega - model.center_omega)
    h = step if step is not None else _fd_step_for(model)
    return (model.wavenumber(omega + h) - model.wavenumber(omega - h)) / (2.0 * h)


def gvd(model, omega: float, step: float | None = None) -> float:
    """Second derivative d^2k/domega^2, exact for Taylor models."""
    if isinstance(model, TaylorDispersion):
        return model.gvd_s2_per_m
    h = step if step is not None else _fd_step_for(model)
    k0 = model.wavenumber(omega)
    return (model.wavenumber(omega + h) - 2.0 * k0 + model.wavenumber(omega - h)) / (h * h)


def phase_mismatch(pump_model, triplet_model, w1, w2, w3):
    """Wavenumber mismatch k_p(w1+w2+w3) - k_t(w1) - k_t(w2) - k_t(w3)."""
    s = np.asarray(w1, dtype=float) + w2 + w3
    return (
        pump_model.wavenumber(s)
        - triplet_model.wavenumber(w1)
        - triplet_model.wavenumber(w2)
        - triplet_model.wavenumber(w3)
    )


def mismatch_on_grid(pump_model, triplet_model, grid: FrequencyGrid) -> np.ndarray:
    """Mismatch tensor on a cubic grid, exactly permutation symmetric.

    For a pair of Taylor models the expanded quadratic form is evaluated
    in grid-local coordinates; this is the same polynomial as the direct
    definition but avoids the cancellation of two large wavenumbers, so
    the sinc argument keeps full precision.  Other model combinations
    take the direct route with symmetric triple sums.
    """
    o = grid.omegas
    if isinstance(pump_model, TaylorDispersion) and isinstance(triplet_model, TaylorDispersion):
        u = o - triplet_model.center_omega
        t = triple_sum(u)
        q = triple_sum(u * u)
        off = 3.0 * triplet_model.center_omega - pump_model.center_omega
        c0 = pump_model.k0 - 3.0 * triplet_model.k0
        ts = t + off
        return (
            c0
            + pump_model.inv_group_velocity * ts
            - triplet_model.inv_group_velocity * t
            + 0.5 * pump_model.gvd_s2_per_m * ts * ts
            - 0.5 * triplet_model.gvd_s2_per_m * q
        )
    s = triple_sum(o)
    kt = np.asarray(triplet_model.wavenumber(o), dtype=float)
    return pump_model.wavenumber(s) - triple_sum(kt)


@dataclass(frozen=True)
class MismatchQuadric:
    """Eigensystem of the quadratic part of the mismatch phase.

    For quadratic dispersion on both modes, (length/2) * mismatch is a
    quadratic form in the three detunings.  Its matrix has eigenvalue
    (length/4)(3 b_p - b_t) along the symmetric axis (1,1,1)/sqrt(3) and
    the doubly degenerate eigenvalue -(length/4) b_t on the orthogonal
    plane.  Eigenvalues carry units of s^2.
    """

    eigenvalues: tuple
    axes: np.ndarray
    matrix: np.ndarray


def mismatch_quadric(length: float, beta_pump: float, beta_triplet: float) -> MismatchQuadric:
    """Closed-form eigensystem of the mismatch quadratic form.

    Args:
        length: propagation length in m, must be positive.
        beta_pump: pump gvd coefficient, s^2/m.
        beta_triplet: triplet gvd coefficient, s^2/m.
    """
    if length <= 0:
        raise InvalidLength(f"length must be positive, got {length}")
    ll = 0.25 * length
    bp, bt = beta_pump, beta_triplet
    matrix = ll * np.array(
        [
            [bp - bt, bp, bp],
            [bp, bp - bt, bp],
            [bp, bp, bp - bt],
        ]
    )
    lam1 = ll * (3.0 * bp - bt)
    lam23 = -ll * bt
    axes = np.array(
        [
            [1.0, 1.0, 1.0] / np.sqrt(3.0),
            [0.0, -1.0, 1.0] / np.sqrt(2.0),
            [2.0, -1.0, -1.0] / np.sqrt(6.0),
        ]
    ).T
    return MismatchQuadric(eigenvalues=(lam1, lam23, lam23), axes=axes, matrix=matrix)


def phase_matching_bandwidth(length: float, gvd_magnitude: float) -> float:
    """Spectral half-width of the quadratic phase-matching profile.

    Returns sqrt(4 pi / (length * |gvd|)) in rad/s: the detuning radius at
    which the sinc phase-matching profile reaches its first zero for pure
    triplet-side quadratic dispersion.
    """
    if length <= 0:
        raise InvalidLength(f"length must be positive, got {length}")
    g = abs(gvd_magnitude)
    if g == 0.0:
        raise ZeroDispersion("gvd magnitude must be nonzero")
    return float(np.sqrt(4.0 * np.pi / (length * g)))


@dataclass(frozen=True)
class PhaseMatchingPoint:
    """Root of the degenerate mismatch, with residual diagnostics."""

    lambda_triplet_m: float
    omega_triplet: float
    mismatch_residual: float
    group_velocity_mismatch: float  # 1/v_pump(3w) - 1/v_triplet(w), s/m


def find_degenerate_phase_matching(
    pump_model,
    triplet_model,
    lambda_lo_m: float,
    lambda_hi_m: float,
    max_iter: int = 80,
) -> PhaseMatchingPoint:
    """Locate the triplet wavelength where k_p(3w) = 3 k_t(w).

    Bisection on the degenerate mismatch m(w) = k_p(3w) - 3 k_t(w) over
    the bracket given in triplet vacuum wavelength.  The bracket endpoints
    must produce opposite signs.

    Returns:
        PhaseMatchingPoint with the root and the group-velocity mismatch
        there (central differences).

    Raises:
        NoSignChange: if the bracket does not straddle a root.
        OutOfRange: propagated from models evaluated outside validity.
    """
    if not 0 < lambda_lo_m < lambda_hi_m:
        raise ValueError("need 0 < lambda_lo < lambda_hi")

    def degenerate_mismatch(w):
        return pump_model.wavenumber(3.0 * w) - 3.0 * triplet_model.wavenumber(w)

    # increasing wavelength maps to decreasing frequency
    w_hi = 2.0 * np.pi * C_VACUUM / lambda_lo_m
    w_lo = 2.0 * np.pi * C_VACUUM / lambda_hi_m
    f_lo = degenerate_mismatch(w_lo)
    f_hi = degenerate_mismatch(w_hi)
    if f_lo == 0.0:
        w_root = w_lo
    elif f_hi == 0.0:
        w_root = w_hi
    elif np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(
            f"mismatch has the same sign at both bracket ends "
            f"({f_lo:.3e}, {f_hi:.3e})"
        )
    else:
        a, fa, bb = w_lo, f_lo, w_hi
        for _ in range(max_iter):
            mid = 0.5 * (a + bb)
            fm = degenerate_mismatch(mid)
            if fm == 0.0:
                a = bb = mid
                break
            if np.sign(fm) == np.sign(fa):
                a, fa = mid, fm
            else:
                bb = mid
        w_root = 0.5 * (a + bb)

    gv = inv_group_velocity(pump_model, 3.0 * w_root) - inv_group_velocity(
        triplet_model, w_root
    )
    return PhaseMatchingPoint(
        lambda_triplet_m=2.0 * np.pi * C_VACUUM / w_root,
        omega_triplet=float(w_root),
        mismatch_residual=float(degenerate_mismatch(w_root)),
        group_velocity_mismatch=float(gv),
    )
