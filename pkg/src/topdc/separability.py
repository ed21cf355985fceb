"""Single-photon reduced density matrix and mode structure.

Tracing two photons out of a pure triplet amplitude leaves

    rho(w, w') = integral over w2, w3 of psi(w, w2, w3) conj(psi(w', w2, w3))

computed here as a weighted matrix product of the reshaped amplitude.
Diagonalizing rho under the quadrature metric gives the mode fractions
and spectral mode functions; the inverse purity 1 / Tr(rho^2) counts the
effective number of modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeRadicand, NonPositiveSemidefinite, NotNormalized
from .grids import FrequencyGrid, HermitianMatrix, hermitian_eig
from .jsa import Jsa

__all__ = [
    "ReducedDensity",
    "ModeDecomposition",
    "reduced_density_matrix",
    "schmidt_number",
    "concurrence",
    "pseudo_schmidt",
    "SymplecticSpectrum",
    "symplectic_excess",
]

# eigenvalues may dip this far below zero before we call the state broken
EIG_FLOOR = -1e-10
# trace of the reduced matrix must sit this close to 1
TRACE_TOL = 1e-9


@dataclass
class ReducedDensity:
    """Reduced one-photon density matrix on a frequency grid."""

    matrix: HermitianMatrix

    def __post_init__(self):
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotNormalized(f"reduced trace {tr!r} not within {TRACE_TOL} of 1")

    @property
    def grid(self) -> FrequencyGrid:
        return self.matrix.grid

    @property
    def values(self) -> np.ndarray:
        return self.matrix.values

    def trace(self) -> float:
        w = self.matrix.grid.weights
        return float(np.sum(w * np.real(np.diag(self.matrix.values))))

    def purity(self) -> float:
        """Tr(rho^2) as a quadrature double integral."""
        w = self.matrix.grid.weights
        acc = np.einsum("i,j,ij->", w, w, np.abs(self.matrix.values) ** 2)
        return float(acc.real)


def reduced_density_matrix(j: Jsa) -> ReducedDensity:
    """Trace out two photons of a unit-norm triplet amplitude."""
    n = j.grid.n_points
    w = j.grid.weights
    pair_weights = (w[:, None] * w[None, :]).ravel()
    flat = j.values.reshape(n, n * n)
    rho = (flat * pair_weights) @ flat.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return ReducedDensity(HermitianMatrix(j.grid, rho))


def schmidt_number(rd: ReducedDensity) -> float:
    """Effective mode count 1 / Tr(rho^2); 1 for a separable amplitude."""
    return 1.0 / rd.purity()


def concurrence(rd: ReducedDensity) -> float:
    """Mixedness measure 2 sqrt(1 - Tr(rho^2)), zero iff single mode."""
    purity = rd.purity()
    radicand = 1.0 - purity
    if radicand < -1e-9:
        raise NegativeRadicand(f"purity {purity!r} exceeds 1")
    return float(2.0 * np.sqrt(max(radicand, 0.0)))


@dataclass
class ModeDecomposition:
    """Mode fractions and quadrature-orthonormal spectral modes.

    ``fractions[m]`` is the weight of mode m (descending, summing to 1)
    and ``modes[:, m]`` its spectral amplitude, orthonormal under the
    grid's quadrature inner product.
    """

    grid: FrequencyGrid
    fractions: np.ndarray
    modes: np.ndarray


def pseudo_schmidt(rd: ReducedDensity) -> ModeDecomposition:
    """Diagonalize the reduced matrix under the quadrature metric.

    The symmetric eigenproblem runs on D^(1/2) rho D^(1/2) with D the
    diagonal weight matrix; eigenvectors map back through D^(-1/2), which
    makes them orthonormal in the quadrature sense.  Eigenvalues in
    [EIG_FLOOR, 0) are clipped to zero; anything lower means the input
    amplitude was broken.
    """
    w = rd.grid.weights
    sq = np.sqrt(w)
    sym = HermitianMatrix(rd.grid, sq[:, None] * rd.values * sq[None, :])
    vals, vecs = hermitian_eig(sym)
    if vals.min() < EIG_FLOOR:
        raise NonPositiveSemidefinite(
            f"reduced matrix eigenvalue {vals.min():.3e} below floor {EIG_FLOOR}"
        )
    fractions = np.clip(vals, 0.0, None)
    total = fractions.sum()
    if abs(total - 1.0) > 1e-6:
        raise NotNormalized(f"mode fractions sum to {total!r}")
    fractions = fractions / total
    modes = vecs / sq[:, None]
    return ModeDecomposition(grid=rd.grid, fractions=fractions, modes=modes)


@dataclass
class SymplecticSpectrum:
    """Leading-order squeezing diagnostics of the emitted field."""

    excesses: np.ndarray
    coherence_diagonal: np.ndarray


def symplectic_excess(triplet_amplitude: float, md: ModeDecomposition) -> SymplecticSpectrum:
    """Per-mode symplectic excess at leading order in the pulse amplitude.

    Each mode's symplectic eigenvalue sits above the vacuum value by
    3 |amplitude|^2 * fraction.  The diagonal of the first-order
    coherence, 3 |amplitude|^2 * rho(w, w), is reported on the grid for
    the same reading.
    """
    p = 3.0 * abs(triplet_amplitude) ** 2
    diag = np.einsum("m,im->i", md.fractions, np.abs(md.modes) ** 2)
    return SymplecticSpectrum(
        excesses=p * md.fractions,
        coherence_diagonal=p * diag,
    )
