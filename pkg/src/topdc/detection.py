"""Local-oscillator shaping, homodyne statistics, splitter coincidences.

The detection figure of merit is the triple overlap

    eta = integral psi(w1, w2, w3) conj(g(w1)) conj(g(w2)) conj(g(w3))

for a local oscillator g of unit quadrature norm.  |eta| is optimized
over the sphere of normalized g by projected gradient ascent, optionally
wrapped in basin hopping.  The same eta sets the size of the cubic
correction to the homodyne quadrature density and of its third moment.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NegativeDensity, NotNormalized
from .grids import FrequencyGrid, quad_inner
from .jsa import Jsa

__all__ = [
    "LocalOscillator",
    "SplitterColumn",
    "OptimizerReport",
    "random_lo",
    "lo_from_mode",
    "overlap_eta",
    "eta_gradient",
    "optimize_lo_gd",
    "optimize_lo_basinhopping",
    "quadrature_pdf",
    "quadrature_moments",
    "splitter_coincidence",
]

NORM_TOL = 1e-9
COLUMN_NORM_TOL = 1e-12

# ascent step control: fresh step per run, grown on success, halved on
# rejection, abandoned below the floor
STEP_INIT = 0.3
STEP_GROW = 1.2
STEP_SHRINK = 0.5
STEP_FLOOR = 1e-12


@dataclass
class LocalOscillator:
    """Complex spectral amplitude of unit quadrature norm."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise NotNormalized(
                f"amplitude shape {v.shape} does not match grid ({self.grid.n_points},)"
            )
        nrm = np.sqrt(quad_inner(self.grid, v, v).real)
        if abs(nrm - 1.0) > NORM_TOL:
            raise NotNormalized(f"quadrature norm {nrm!r} not within {NORM_TOL} of 1")
        self.values = v


@dataclass
class SplitterColumn:
    """One column of the three-port splitter unitary."""

    u0: complex
    u1: complex
    u2: complex

    def __post_init__(self):
        total = abs(self.u0) ** 2 + abs(self.u1) ** 2 + abs(self.u2) ** 2
        if abs(total - 1.0) > COLUMN_NORM_TOL:
            raise NotNormalized(f"column norm^2 {total!r} not within {COLUMN_NORM_TOL} of 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.u0, self.u1, self.u2], dtype=np.complex128)


@dataclass
class OptimizerReport:
    """Outcome of an |eta| ascent run.

    ``overlap`` is the complex eta at the final point; its magnitude is
    the optimized objective and its phase is reported rather than fixed.
    ``gradient_norm`` is the Euclidean norm of the tangent gradient in
    sqrt(weight)-scaled coordinates, which makes it dimensionless.
    """

    lo: LocalOscillator
    overlap: complex
    gradient_norm: float
    iterations: int
    converged: bool
    hops_accepted: int = 0

    @property
    def magnitude(self) -> float:
        return abs(self.overlap)


def random_lo(grid: FrequencyGrid, rng: np.random.Generator) -> LocalOscillator:
    """Uniform draw on the sphere of normalized amplitudes."""
    n = grid.n_points
    y = rng.uniform(-1.0, 1.0, n) + 1j * rng.uniform(-1.0, 1.0, n)
    y /= np.linalg.norm(y)
    return LocalOscillator(grid, y / np.sqrt(grid.weights))


def lo_from_mode(grid: FrequencyGrid, mode: np.ndarray) -> LocalOscillator:
    """Wrap a spectral mode as a local oscillator, renormalizing."""
    v = np.asarray(mode, dtype=np.complex128)
    nrm = np.sqrt(quad_inner(grid, v, v).real)
    if nrm == 0.0:
        raise NotNormalized("mode amplitude is identically zero")
    return LocalOscillator(grid, v / nrm)


def overlap_eta(j: Jsa, lo: LocalOscillator) -> complex:
    """Triple overlap of the amplitude with one oscillator mode."""
    j.grid.require_same(lo.grid)
    cg = j.grid.weights * np.conj(lo.values)
    return complex(np.einsum("ijk,i,j,k->", j.values, cg, cg, cg))


def eta_gradient(j: Jsa, lo: LocalOscillator) -> np.ndarray:
    """Ambient gradient of |eta| packed as a complex vector.

    Component i holds d|eta|/dRe(g_i) + 1j * d|eta|/dIm(g_i), with no
    sphere projection applied.  Permutation symmetry of the amplitude
    reduces the derivative to three times one slice contraction.
    """
    j.grid.require_same(lo.grid)
    w = j.grid.weights
    cg = w * np.conj(lo.values)
    n = j.grid.n_points
    pair = (j.values.reshape(n * n, n) @ cg).reshape(n, n)
    h = 3.0 * w * (pair @ cg)
    eta = (h @ np.conj(lo.values)) / 3.0
    mag = abs(eta)
    if mag == 0.0:
        return np.zeros(n, dtype=np.complex128)
    return (np.conj(eta) / mag) * h


class _SphereObjective:
    """|eta| and its tangent gradient over the Euclidean unit sphere.

    Coordinates are y = sqrt(w) * g, so the quadrature norm constraint
    becomes ||y|| = 1 and gradient norms are dimensionless.  The scaled
    amplitude tensor is contracted slice-wise, once per evaluation.
    """

    def __init__(self, j: Jsa):
        n = j.grid.n_points
        sw = np.sqrt(j.grid.weights)
        scaled = j.values * sw[:, None, None] * sw[None, :, None] * sw[None, None, :]
        self.n = n
        self.sw = sw
        self.flat = scaled.reshape(n * n, n)

    def state(self, y: np.ndarray):
        yc = y.conj()
        pair = (self.flat @ yc).reshape(self.n, self.n)
        h = 3.0 * (pair @ yc)
        eta = complex(h @ yc) / 3.0
        mag = abs(eta)
        if mag == 0.0:
            grad = np.zeros_like(h)
        else:
            grad = (np.conj(eta) / mag) * h
        tangent = grad - np.real(np.vdot(y, grad)) * y
        return eta, tangent

    def ascend(self, y0, tol, max_iter, step=STEP_INIT):
        """Projected ascent with adaptive step; returns final state."""
        y = y0 / np.linalg.norm(y0)
        eta, gt = self.state(y)
        for it in range(max_iter):
            gn = float(np.linalg.norm(gt))
            if gn < tol:
                return y, eta, gn, it, True
            while step > STEP_FLOOR:
                cand = y + step * gt
                cand /= np.linalg.norm(cand)
                eta2, gt2 = self.state(cand)
                if abs(eta2) > abs(eta):
                    y, eta, gt = cand, eta2, gt2
                    step *= STEP_GROW
                    break
                step *= STEP_SHRINK
            else:
                # no improving step left: stalled short of the tolerance
                return y, eta, float(np.linalg.norm(gt)), it, False
        return y, eta, float(np.linalg.norm(gt)), max_iter, False

    def lo(self, y, grid: FrequencyGrid) -> LocalOscillator:
        return LocalOscillator(grid, y / self.sw)


def optimize_lo_gd(
    j: Jsa,
    seed_lo: LocalOscillator,
    *,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> OptimizerReport:
    """Projected gradient ascent on |eta| from one starting point."""
    j.grid.require_same(seed_lo.grid)
    obj = _SphereObjective(j)
    y0 = obj.sw * seed_lo.values
    y, eta, gn, iters, ok = obj.ascend(y0, tol, max_iter)
    return OptimizerReport(
        lo=obj.lo(y, j.grid),
        overlap=eta,
        gradient_norm=gn,
        iterations=iters,
        converged=ok,
    )


def optimize_lo_basinhopping(
    j: Jsa,
    seed_lo: LocalOscillator,
    *,
    n_hops: int = 20,
    perturb_scale: float = 0.1,
    rng_seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> OptimizerReport:
    """Gradient ascent chained through random restarts near the best point.

    Each hop perturbs the best y with complex Gaussian noise of the given
    scale, re-runs the local ascent, and keeps the result only on strict
    improvement of |eta|.  Deterministic for a fixed rng_seed; n_hops=0
    reduces to a single gradient run.
    """
    j.grid.require_same(seed_lo.grid)
    obj = _SphereObjective(j)
    rng = np.random.default_rng(rng_seed)

    y, eta, gn, iters, ok = obj.ascend(obj.sw * seed_lo.values, tol, max_iter)
    total_iters = iters
    accepted = 0
    for _ in range(n_hops):
        noise = rng.standard_normal(obj.n) + 1j * rng.standard_normal(obj.n)
        y2, eta2, gn2, it2, ok2 = obj.ascend(y + perturb_scale * noise, tol, max_iter)
        total_iters += it2
        if abs(eta2) > abs(eta):
            y, eta, gn, ok = y2, eta2, gn2, ok2
            accepted += 1
    return OptimizerReport(
        lo=obj.lo(y, j.grid),
        overlap=eta,
        gradient_norm=gn,
        iterations=total_iters,
        converged=ok,
        hops_accepted=accepted,
    )


def quadrature_pdf(x, theta: float, triplet_amplitude: float, mode_overlap: float):
    """Quadrature density at phase theta, to first order in the amplitude.

    p(x) = (1/sqrt(pi)) exp(-x^2) [1 + a*(2/sqrt(3))*(2x^3 - 3x)*cos(3*theta)]
    with a the product of the per-pulse amplitude and the mode overlap.
    Values of a large enough to push the density negative trigger a
    NegativeDensity warning: the expansion has broken down there.
    """
    xs = np.asarray(x, dtype=np.float64)
    a = triplet_amplitude * mode_overlap
    cubic = (2.0 / np.sqrt(3.0)) * (2.0 * xs**3 - 3.0 * xs)
    p = np.exp(-(xs**2)) / np.sqrt(np.pi) * (1.0 + a * np.cos(3.0 * theta) * cubic)
    if np.any(p < 0.0):
        warnings.warn(
            NegativeDensity(
                f"density negative at {int(np.sum(p < 0.0))} of {p.size} points; "
                "first-order expansion invalid at this amplitude"
            ),
            stacklevel=2,
        )
    if np.isscalar(x):
        return float(p)
    return p


def quadrature_moments(triplet_amplitude: float, mode_overlap: float, theta: float):
    """First four quadrature moments (m1, m2, m3, m4) at leading order.

    Only the third moment carries the triplet signature; the others match
    vacuum because the cubic correction is odd.
    """
    m3 = np.sqrt(3.0) * triplet_amplitude * mode_overlap * np.cos(3.0 * theta)
    return 0.0, 0.5, float(m3), 0.75


def splitter_coincidence(u: SplitterColumn, convention: str = "product") -> float:
    """Relative triple-coincidence probability behind a three-port splitter.

    "product" returns |u0 u1 u2|^2, the plain product of single-port
    intensities (1/27 at the balanced point).  "bosonic" multiplies by
    the 3! ways three identical photons land one per port, the exact
    one-per-port weight of the symmetrized triple (2/9 at balance).
    Both are maximized by the balanced column.
    """
    prod = abs(u.u0 * u.u1 * u.u2) ** 2
    if convention == "product":
        return float(prod)
    if convention == "bosonic":
        return float(6.0 * prod)
    raise ConfigError("convention", f"unknown convention {convention!r}")
