"""Uniform frequency grids and the small dense-linear-algebra layer.

Everything downstream integrates with trapezoid weights on a uniform grid,
so the quadrature rule lives here and nowhere else.  Three-axis tensors are
plain complex ndarrays of shape (n, n, n) indexed like t[i1, i2, i3] with
every axis sampling the same grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, NonHermitianInput, OutOfRange

__all__ = [
    "FrequencyGrid",
    "SpectralTensor",
    "HermitianMatrix",
    "triple_sum",
    "l2_norm3",
    "quad_inner",
    "hermitian_eig",
    "interp_linear",
]


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform angular-frequency grid with trapezoid quadrature weights.

    Weights are the plain trapezoid rule: step size at interior points,
    half step at the two endpoints, so sum(weights) equals the window
    width exactly (up to rounding).
    """

    omega_min: float
    omega_max: float
    n_points: int
    omegas: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.omega_max > self.omega_min:
            raise ValueError("omega_max must exceed omega_min")
        if self.n_points < 2:
            raise ValueError("need at least 2 grid points")
        omegas = np.linspace(self.omega_min, self.omega_max, self.n_points)
        weights = np.full(self.n_points, omegas[1] - omegas[0])
        weights[0] *= 0.5
        weights[-1] *= 0.5
        omegas.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "weights", weights)

    @property
    def step(self) -> float:
        return self.omegas[1] - self.omegas[0]

    @property
    def center(self) -> float:
        return 0.5 * (self.omega_min + self.omega_max)

    def same_as(self, other: "FrequencyGrid") -> bool:
        return (
            self.omega_min == other.omega_min
            and self.omega_max == other.omega_max
            and self.n_points == other.n_points
        )

    def require_same(self, other: "FrequencyGrid"):
        if not self.same_as(other):
            raise GridMismatch(
                f"grids differ: [{self.omega_min}, {self.omega_max}] x {self.n_points} "
                f"vs [{other.omega_min}, {other.omega_max}] x {other.n_points}"
            )


@dataclass
class SpectralTensor:
    """Complex three-axis amplitude sampled on a shared frequency grid."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        if self.values.shape != (n, n, n):
            raise ValueError(f"expected shape {(n, n, n)}, got {self.values.shape}")
        self.values = np.asarray(self.values, dtype=np.complex128)


@dataclass
class HermitianMatrix:
    """Hermitian matrix on a frequency grid, checked at construction."""

    grid: FrequencyGrid
    values: np.ndarray

    # construction tolerance on |m - m^dagger|, absolute
    HERMITICITY_ATOL = 1e-12

    def __post_init__(self):
        n = self.grid.n_points
        if self.values.shape != (n, n):
            raise ValueError(f"expected shape {(n, n)}, got {self.values.shape}")
        self.values = np.asarray(self.values, dtype=np.complex128)
        dev = np.max(np.abs(self.values - self.values.conj().T))
        if dev > self.HERMITICITY_ATOL * max(1.0, np.max(np.abs(self.values))):
            raise NonHermitianInput(f"hermiticity deviation {dev:.3e}")


def triple_sum(x: np.ndarray) -> np.ndarray:
    """Broadcast x[i] + x[j] + x[k] to shape (n, n, n), exactly symmetric.

    The three addends are sorted elementwise with a min/median/max network
    before summing, so the result is invariant under axis permutations to
    the last bit.  Naive broadcasting is only symmetric up to rounding,
    which downstream symmetry assertions would see.
    """
    a = x[:, None, None]
    b = x[None, :, None]
    c = x[None, None, :]
    lo = np.minimum(np.minimum(a, b), c)
    hi = np.maximum(np.maximum(a, b), c)
    mid = np.maximum(np.minimum(a, b), np.minimum(np.maximum(a, b), c))
    return (lo + mid) + hi


def l2_norm3(t: SpectralTensor) -> float:
    """Quadrature L2 norm of a three-axis tensor.

    Returns sqrt(sum_ijk w_i w_j w_k |t_ijk|^2) with the grid's trapezoid
    weights on every axis.
    """
    w = t.grid.weights
    acc = np.einsum("ijk,i,j,k->", np.abs(t.values) ** 2, w, w, w)
    return float(np.sqrt(acc.real))


def quad_inner(grid: FrequencyGrid, a: np.ndarray, b: np.ndarray) -> complex:
    """Quadrature inner product sum_i w_i conj(a_i) b_i."""
    return complex(np.sum(grid.weights * np.conj(a) * b))


def hermitian_eig(m: HermitianMatrix):
    """Eigendecomposition of a Hermitian matrix, descending eigenvalues.

    Args:
        m: matrix to decompose; hermiticity is re-checked against
           1e-9 * ||m|| (Frobenius) before calling the solver.

    Returns:
        (eigenvalues, eigenvectors): values sorted descending, vectors in
        matching columns, orthonormal in the Euclidean sense.
    """
    vals_scale = np.linalg.norm(m.values)
    dev = np.linalg.norm(m.values - m.values.conj().T)
    if vals_scale > 0 and dev > 1e-9 * vals_scale:
        raise NonHermitianInput(f"hermiticity deviation {dev:.3e} vs norm {vals_scale:.3e}")
    vals, vecs = np.linalg.eigh(m.values)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def interp_linear(xs: np.ndarray, ys: np.ndarray, x):
    """Piecewise-linear interpolation with hard range checking.

    Args:
        xs: strictly increasing sample locations.
        ys: sample values.
        x: scalar or array of query points.

    Returns:
        Interpolated values, same shape as x.

    Raises:
        OutOfRange: if any query point lies outside [xs[0], xs[-1]].
        ValueError: if xs is not strictly increasing.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing with at least 2 samples")
    xq = np.asarray(x, dtype=float)
    if np.any(xq < xs[0]) or np.any(xq > xs[-1]):
        raise OutOfRange(
            f"query outside table range [{xs[0]:.6e}, {xs[-1]:.6e}]"
        )
    out = np.interp(xq, xs, ys)
    return float(out) if np.isscalar(x) or xq.ndim == 0 else out
