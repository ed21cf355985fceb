"""Shared fixtures: preset pipelines are expensive, build them once."""

import numpy as np
import pytest

import topdc


@pytest.fixture(scope="session")
def ideal_config():
    return topdc.load_preset("ideal-waveguide")


@pytest.fixture(scope="session")
def ideal_jsa(ideal_config):
    return topdc.build_configured_jsa(ideal_config)


@pytest.fixture(scope="session")
def ideal_rd(ideal_jsa):
    return topdc.reduced_density_matrix(ideal_jsa)


@pytest.fixture(scope="session")
def ideal_md(ideal_rd):
    return topdc.pseudo_schmidt(ideal_rd)


@pytest.fixture(scope="session")
def ring_mismatched_jsa():
    return topdc.build_configured_jsa(topdc.load_preset("ring-mismatched-q"))


@pytest.fixture(scope="session")
def taper_config():
    return topdc.load_preset("geo2-taper-taylor")


@pytest.fixture(scope="session")
def taper_jsa(taper_config):
    return topdc.build_configured_jsa(taper_config)


def toy_symmetric_jsa(n=16, seed=0, grid_span=(0.0, 1.0)):
    """Small random unit-norm symmetric amplitude for property tests."""
    rng = np.random.default_rng(seed)
    grid = topdc.FrequencyGrid(grid_span[0], grid_span[1], n)
    raw = rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n))
    sym = np.zeros_like(raw)
    for axes in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        sym = sym + np.transpose(raw, axes)
    w = grid.weights
    nrm = np.sqrt(np.einsum("ijk,i,j,k->", np.abs(sym) ** 2, w, w, w).real)
    tensor = topdc.SpectralTensor(grid, sym / nrm)
    return topdc.Jsa(tensor=tensor, triplet_amplitude=1e-3)


def separable_jsa(grid, mode, amplitude=1e-3):
    """Product amplitude psi(w1)psi(w2)psi(w3) from one unit-norm mode."""
    w = grid.weights
    v = np.asarray(mode, dtype=np.complex128)
    v = v / np.sqrt(np.sum(w * np.abs(v) ** 2))
    tensor = topdc.SpectralTensor(grid, v[:, None, None] * v[None, :, None] * v[None, None, :])
    return topdc.Jsa(tensor=tensor, triplet_amplitude=amplitude)
