"""Triplet joint spectral amplitudes for waveguide and ring sources.

Both builders produce a :class:`Jsa`: a unit-norm three-photon spectral
amplitude on a cubic grid together with the per-pulse generation
amplitude.  The unnormalized kernel is integrated first; one sixth of its
squared norm is the per-pulse triplet probability, and the normalized
amplitude keeps a global factor i by convention so the generation
amplitude itself can stay real and nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dispersion import C_VACUUM, gvd, mismatch_on_grid, phase_matching_bandwidth
from .errors import EmptyFilter, NotNormalized, ZeroKernel
from .grids import FrequencyGrid, SpectralTensor, l2_norm3, triple_sum

__all__ = [
    "HBAR",
    "Pump",
    "pump_envelope",
    "WaveguideSource",
    "RingResonance",
    "RingSource",
    "Jsa",
    "waveguide_grid",
    "ring_grid",
    "phase_matching_sinc",
    "build_waveguide_jsa",
    "field_enhancement",
    "build_ring_jsa",
    "apply_filter",
    "spectral_projection",
]

# reduced Planck constant, J s (CODATA 2018)
HBAR = 1.054571817e-34

# tolerance on the unit norm of a constructed amplitude
NORM_TOL = 1e-9
# tolerance on permutation symmetry relative to the peak amplitude
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class Pump:
    """Gaussian pump pulse in the spectral domain.

    The envelope is alpha(w) = peak * exp(-(w - omega_center)^2 / (2 sigma^2))
    normalized so its squared integral equals the photon number, which
    fixes peak = sqrt(photon_number / (sigma sqrt(pi))).
    """

    omega_center: float
    sigma: float
    photon_number: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.photon_number <= 0:
            raise ValueError("photon number must be positive")

    @classmethod
    def from_pulse(cls, wavelength_m: float, fwhm_s: float, energy_j: float) -> "Pump":
        """Build from center wavelength, intensity FWHM duration, and energy."""
        omega = 2.0 * np.pi * C_VACUUM / wavelength_m
        sigma = 2.0 * np.sqrt(np.log(2.0)) / fwhm_s
        photons = energy_j / (HBAR * omega)
        return cls(omega_center=omega, sigma=sigma, photon_number=photons)

    @property
    def peak_amplitude(self) -> float:
        return float(np.sqrt(self.photon_number / (self.sigma * np.sqrt(np.pi))))


def pump_envelope(pump: Pump, omega_sum):
    """Spectral envelope evaluated at the (summed) frequency argument."""
    d = np.asarray(omega_sum, dtype=float) - pump.omega_center
    out = pump.peak_amplitude * np.exp(-(d * d) / (2.0 * pump.sigma**2))
    return float(out) if np.isscalar(omega_sum) else out


@dataclass(frozen=True)
class WaveguideSource:
    """Waveguide triplet source description.

    ``coupling`` is the effective third-order interaction strength; its
    absolute scale is opaque here (no published value accompanies the
    configuration this models), so outputs proportional to it are
    relative unless a calibrated value is supplied.
    """

    length: float
    coupling: complex
    pump_model: object
    triplet_model: object
    pump: Pump

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")


@dataclass(frozen=True)
class RingResonance:
    """One ring resonance: center frequency, loaded Q, coupling magnitude."""

    omega_res: float
    q_factor: float
    coupling_magnitude: float = 1.0

    def __post_init__(self):
        if self.omega_res <= 0 or self.q_factor <= 0:
            raise ValueError("resonance frequency and Q must be positive")

    @property
    def linewidth(self) -> float:
        """Half width of the intensity resonance: omega / (2 Q)."""
        return self.omega_res / (2.0 * self.q_factor)


@dataclass(frozen=True)
class RingSource:
    """Ring-resonator triplet source description."""

    circumference: float
    coupling: complex
    pump_resonance: RingResonance
    triplet_resonance: RingResonance
    pump: Pump

    def __post_init__(self):
        if self.circumference <= 0:
            raise ValueError("circumference must be positive")


@dataclass
class Jsa:
    """Unit-norm triplet spectral amplitude plus per-pulse amplitude.

    ``tensor.values[i, j, k]`` samples the amplitude at
    (omega_i, omega_j, omega_k); the squared ``triplet_amplitude`` is the
    per-pulse triplet probability.  Construction verifies unit quadrature
    norm and permutation symmetry (two generating transpositions imply
    the full group).
    """

    tensor: SpectralTensor
    triplet_amplitude: float

    def __post_init__(self):
        norm = l2_norm3(self.tensor)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"quadrature norm {norm!r} not within {NORM_TOL} of 1")
        v = self.tensor.values
        peak = np.max(np.abs(v))
        for axes in ((1, 0, 2), (0, 2, 1)):
            dev = np.max(np.abs(v - np.transpose(v, axes)))
            if dev > SYMMETRY_TOL * peak:
                raise NotNormalized(
                    f"permutation symmetry violated: {dev:.3e} vs peak {peak:.3e}"
                )

    @property
    def grid(self) -> FrequencyGrid:
        return self.tensor.grid

    @property
    def values(self) -> np.ndarray:
        return self.tensor.values


def waveguide_grid(source: WaveguideSource, n_points: int = 101, span: float = 3.5) -> FrequencyGrid:
    """Default cubic grid for a waveguide source.

    Centered on one third of the pump frequency with half-width
    span * max(pump sigma, phase-matching bandwidth).
    """
    center = source.pump.omega_center / 3.0
    beta_t = gvd(source.triplet_model, center)
    half = span * max(source.pump.sigma, phase_matching_bandwidth(source.length, beta_t))
    return FrequencyGrid(center - half, center + half, n_points)


def ring_grid(source: RingSource, n_points: int = 161, span: float = 8.0) -> FrequencyGrid:
    """Default cubic grid for a ring source: span linewidths around resonance."""
    center = source.triplet_resonance.omega_res
    half = span * source.triplet_resonance.linewidth
    return FrequencyGrid(center - half, center + half, n_points)


def phase_matching_sinc(mismatch, length: float):
    """sinc(length * mismatch / 2) with sinc(0) = 1."""
    x = np.asarray(mismatch, dtype=float) * (length / 2.0)
    return np.sinc(x / np.pi)


def _normalize_kernel(grid: FrequencyGrid, kernel: np.ndarray) -> Jsa:
    raw = SpectralTensor(grid, kernel)
    norm = l2_norm3(raw)
    eps2 = norm * norm / 6.0
    if eps2 == 0.0:
        raise ZeroKernel("source kernel vanishes on this grid")
    eps = float(np.sqrt(eps2))
    psi = 1j * kernel / (eps * np.sqrt(6.0))
    return Jsa(tensor=SpectralTensor(grid, psi), triplet_amplitude=eps)


def build_waveguide_jsa(source: WaveguideSource, grid: FrequencyGrid) -> Jsa:
    """Assemble and normalize the waveguide triplet amplitude.

    Kernel: (hbar w_t / pi) * coupling * length * alpha(w1+w2+w3)
    * sinc(length * mismatch / 2), with w_t one third of the pump center.
    The per-pulse probability is one sixth of the kernel's squared norm.
    """
    c = grid.center
    t = triple_sum(grid.omegas - c)
    sum_offset = 3.0 * c - source.pump.omega_center
    alpha = pump_envelope(
        source.pump, source.pump.omega_center + (t + sum_offset)
    )
    mism = mismatch_on_grid(source.pump_model, source.triplet_model, grid)
    omega_t = source.pump.omega_center / 3.0
    prefactor = HBAR * omega_t / np.pi * source.coupling * source.length
    kernel = prefactor * alpha * phase_matching_sinc(mism, source.length)
    return _normalize_kernel(grid, kernel)


def field_enhancement(resonance: RingResonance, circumference: float, omega, sign: int = +1):
    """Ring field-enhancement factor for one resonance.

    F(omega) = (1 / sqrt(circumference)) * conj(gamma) / ((w_res - omega)
    + sign * i * linewidth).  The squared magnitude integrates to
    pi |gamma|^2 / (circumference * linewidth) over the full line.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    g = resonance.linewidth
    det = resonance.omega_res - np.asarray(omega, dtype=float)
    return (
        np.conj(resonance.coupling_magnitude)
        / np.sqrt(circumference)
        / (det + sign * 1j * g)
    )


def build_ring_jsa(source: RingSource, grid: FrequencyGrid) -> Jsa:
    """Assemble and normalize the ring-resonator triplet amplitude.

    Kernel: (hbar w_t / pi) * coupling * circumference times the
    conjugated triplet enhancement factor on each axis, the conjugated
    pump enhancement factor at the summed frequency, and the pump
    envelope there.
    """
    res_t = source.triplet_resonance
    res_p = source.pump_resonance
    # conj of the "+" branch triplet factor, evaluated per axis
    lf = np.conj(field_enhancement(res_t, source.circumference, grid.omegas, sign=+1))
    c = grid.center
    t = triple_sum(grid.omegas - c)
    omega_sum = (t + 3.0 * c - source.pump.omega_center) + source.pump.omega_center
    pf = np.conj(field_enhancement(res_p, source.circumference, omega_sum, sign=-1))
    alpha = pump_envelope(source.pump, omega_sum)
    omega_t = source.pump.omega_center / 3.0
    prefactor = HBAR * omega_t / np.pi * source.coupling * source.circumference
    kernel = (
        prefactor
        * lf[:, None, None]
        * lf[None, :, None]
        * lf[None, None, :]
        * pf
        * alpha
    )
    return _normalize_kernel(grid, kernel)


def apply_filter(j: Jsa, window: tuple) -> Jsa:
    """Apply a rectangular spectral filter to all three photons.

    The amplitude outside [window[0], window[1]] is zeroed on every axis,
    the state renormalized, and the per-pulse amplitude scaled by the
    square root of the retained probability.  A window covering the whole
    grid returns the input unchanged.

    Raises:
        EmptyFilter: if the retained probability falls below 1e-12.
    """
    lo, hi = window
    if not hi > lo:
        raise ValueError("filter window must have hi > lo")
    mask = (j.grid.omegas >= lo) & (j.grid.omegas <= hi)
    if mask.all():
        return j
    m3 = mask[:, None, None] & mask[None, :, None] & mask[None, None, :]
    cut = np.where(m3, j.values, 0.0)
    retained = l2_norm3(SpectralTensor(j.grid, cut)) ** 2
    if retained < 1e-12:
        raise EmptyFilter(f"retained probability {retained:.3e}")
    scale = float(np.sqrt(retained))
    return Jsa(
        tensor=SpectralTensor(j.grid, cut / scale),
        triplet_amplitude=j.triplet_amplitude * scale,
    )


def spectral_projection(j: Jsa) -> np.ndarray:
    """Two-frequency projection: integrate |amplitude|^2 over the third axis.

    Returns the symmetric matrix s[i, j] = sum_k w_k |values[i, j, k]|^2
    whose quadrature double integral is 1.
    """
    return np.einsum("ijk,k->ij", np.abs(j.values) ** 2, j.grid.weights)
