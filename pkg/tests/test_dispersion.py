"""Wavenumber models, phase mismatch, quadric analysis, bandwidth."""

import itertools

import numpy as np
import pytest

from topdc.dispersion import (
    C_VACUUM,
    SellmeierDispersion,
    SellmeierMaterial,
    TabulatedDispersion,
    TaylorDispersion,
    find_degenerate_phase_matching,
    fused_silica,
    geo2_doped_silica,
    geo2_glass,
    gvd,
    inv_group_velocity,
    mismatch_on_grid,
    mismatch_quadric,
    phase_matching_bandwidth,
    phase_mismatch,
)
from topdc.errors import (
    InvalidLength,
    NoSignChange,
    OutOfRange,
    ZeroDispersion,
)
from topdc.grids import FrequencyGrid, triple_sum

# Oracle: the published coefficient sets evaluated directly through the
# three-term formula, pinned to full double precision.
N_SILICA_D_LINE = 1.4584623420532408   # 0.5876 um
N_SILICA_1376 = 1.4460541557122442     # 1.376 um
N_DOPED36_1376 = 1.4990046202810725    # GeO2 fraction 0.36, 1.376 um


def _oracle_index(mat, lam_um):
    l2 = lam_um * lam_um
    return float(np.sqrt(1.0 + sum(bi * l2 / (l2 - li) for bi, li in zip(mat.b, mat.l_um2))))


class TestSellmeier:
    def test_silica_known_points(self):
        si = fused_silica()
        assert si.index(0.5876) == pytest.approx(N_SILICA_D_LINE, abs=1e-4)
        assert si.index(1.376) == pytest.approx(N_SILICA_1376, abs=1e-4)
        for lam in (0.5876, 1.376):
            assert si.index(lam) == pytest.approx(_oracle_index(si, lam), rel=1e-14)

    def test_doped_known_point(self):
        mat = geo2_doped_silica(0.36)
        assert mat.index(1.376) == pytest.approx(N_DOPED36_1376, abs=1e-4)
        assert mat.index(1.376) == pytest.approx(_oracle_index(mat, 1.376), rel=1e-14)

    def test_vacuum_limit(self):
        mat = SellmeierMaterial(name="null", b=(0.0, 0.0, 0.0),
                                l_um2=(0.01, 0.02, 100.0),
                                valid_um=(0.2, 5.0), citation="n/a")
        assert mat.index(1.0) == 1.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            fused_silica().index(0.05)
        with pytest.raises(OutOfRange):
            fused_silica().index(10.0)

    def test_array_input(self):
        si = fused_silica()
        got = si.index(np.array([0.5876, 1.376]))
        assert got == pytest.approx([N_SILICA_D_LINE, N_SILICA_1376], rel=1e-12)

    def test_doped_family(self):
        # fraction 0 is silica, fraction 1 the germania end member
        assert geo2_doped_silica(0.0).index(1.376) == pytest.approx(
            fused_silica().index(1.376), rel=1e-14)
        assert geo2_doped_silica(1.0).index(1.376) == pytest.approx(
            geo2_glass().index(1.376), rel=1e-14)
        # doping raises the index monotonically at fixed wavelength
        n_prev = fused_silica().index(1.376)
        for frac in (0.1, 0.36, 0.7, 1.0):
            n_here = geo2_doped_silica(frac).index(1.376)
            assert n_here > n_prev
            n_prev = n_here

    def test_doped_fraction_bounds(self):
        with pytest.raises(ValueError):
            geo2_doped_silica(1.5)
        with pytest.raises(ValueError):
            geo2_doped_silica(-0.1)


class TestWavenumber:
    def test_taylor_at_center(self):
        m = TaylorDispersion(center_omega=2e15, k0=1e7,
                             inv_group_velocity=5e-9, gvd_s2_per_m=1e-26)
        assert m.wavenumber(2e15) == 1e7

    def test_taylor_constant(self):
        m = TaylorDispersion(center_omega=2e15, k0=1e7,
                             inv_group_velocity=0.0, gvd_s2_per_m=0.0)
        for w in (1e15, 2e15, 3.7e15):
            assert m.wavenumber(w) == 1e7

    def test_sellmeier_wavenumber(self):
        model = SellmeierDispersion(fused_silica())
        w = 2.0 * np.pi * C_VACUUM / 1.376e-6
        assert model.wavenumber(w) == pytest.approx(
            N_SILICA_1376 * w / C_VACUUM, rel=1e-12)

    def test_tabulated_constant_index(self):
        omegas = np.linspace(1e15, 3e15, 20)
        m = TabulatedDispersion(omegas, np.full(20, 1.5))
        # hand evaluation: k = n w / c
        assert m.wavenumber(2e15) == pytest.approx(1.5 * 2e15 / C_VACUUM, rel=1e-14)
        assert m.wavenumber(2e15) == pytest.approx(10006922.855944559, rel=1e-12)

    def test_tabulated_hard_domain(self):
        omegas = np.linspace(1e15, 3e15, 20)
        m = TabulatedDispersion(omegas, np.full(20, 1.5))
        with pytest.raises(OutOfRange):
            m.wavenumber(0.99e15)

    def test_tabulated_needs_rows_and_order(self):
        with pytest.raises(ValueError):
            TabulatedDispersion(np.linspace(1e15, 2e15, 10), np.full(10, 1.5))
        bad = np.linspace(1e15, 3e15, 20)
        bad[5] = bad[4]
        with pytest.raises(ValueError):
            TabulatedDispersion(bad, np.full(20, 1.5))

    def test_tabulated_csv_roundtrip(self, tmp_path):
        omegas = np.linspace(1e15, 3e15, 16)
        n_eff = 1.4 + 0.01 * np.linspace(0, 1, 16)
        path = tmp_path / "disp.csv"
        lines = ["omega_rad_s,n_eff"]
        lines += [f"{float(w)!r},{float(n)!r}" for w, n in zip(omegas, n_eff)]
        path.write_text("\n".join(lines) + "\n")
        m = TabulatedDispersion.from_csv(path)
        assert m.wavenumber(2e15) == pytest.approx(
            np.interp(2e15, omegas, n_eff) * 2e15 / C_VACUUM, rel=1e-12)

    def test_tabulated_csv_header_enforced(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("omega,n\n1.0,1.5\n")
        with pytest.raises(ValueError):
            TabulatedDispersion.from_csv(path)


def _matched_pair(beta_p=0.0, beta_f=0.0):
    pump = TaylorDispersion(center_omega=3e15, k0=3e7,
                            inv_group_velocity=5e-9, gvd_s2_per_m=beta_p)
    trip = TaylorDispersion(center_omega=1e15, k0=1e7,
                            inv_group_velocity=5e-9, gvd_s2_per_m=beta_f)
    return pump, trip


class TestPhaseMismatch:
    def test_fully_matched_vanishes(self):
        pump, trip = _matched_pair()
        for d in (0.0, 1e13, -3e13):
            assert phase_mismatch(pump, trip, 1e15 + d, 1e15 - 2 * d, 1e15 + d) \
                == pytest.approx(0.0, abs=1e-9)

    def test_scale_check_quadratic_term(self):
        # only the triplet quadratic term survives: -(beta_f/2) * 3 d^2.
        # beta_f = 2 fs^2/mm = 2e-27 s^2/m at d = 1e13 rad/s on each leg
        # gives -1e-27 * 3e26 = -0.3 per meter.
        pump, trip = _matched_pair(beta_p=0.0, beta_f=2e-27)
        got = phase_mismatch(pump, trip, 1e15 + 1e13, 1e15 + 1e13, 1e15 + 1e13)
        assert got == pytest.approx(-0.3, rel=1e-6)

    def test_permutation_symmetric(self):
        pump, trip = _matched_pair(beta_p=4e-27, beta_f=2.19e-26)
        w = (1.01e15, 0.98e15, 1.03e15)
        base = phase_mismatch(pump, trip, *w)
        for p in itertools.permutations(w):
            # reordering perturbs the rounded frequency sum by an ulp of
            # 3e15, felt through the pump group slope
            assert phase_mismatch(pump, trip, *p) == pytest.approx(
                base, rel=1e-9, abs=1e-8)

    def test_grid_form_matches_pointwise(self):
        pump, trip = _matched_pair(beta_p=6.4e-27, beta_f=2.19e-26)
        grid = FrequencyGrid(1e15 - 2e14, 1e15 + 2e14, 9)
        got = mismatch_on_grid(pump, trip, grid)
        o = grid.omegas
        kt = trip.wavenumber(o)
        direct = pump.wavenumber(triple_sum(o)) - (
            kt[:, None, None] + kt[None, :, None] + kt[None, None, :])
        # the direct route cancels two ~3e7-sized wavenumbers, so the
        # comparison floor is that cancellation noise, not the expanded
        # path's own accuracy
        term_scale = 0.5 * 2.19e-26 * 3.0 * (2e14) ** 2
        assert np.max(np.abs(got - direct)) <= 1e-10 * term_scale

    def test_grid_form_exactly_symmetric(self):
        pump, trip = _matched_pair(beta_p=6.4e-27, beta_f=2.19e-26)
        grid = FrequencyGrid(0.8e15, 1.2e15, 7)
        t = mismatch_on_grid(pump, trip, grid)
        assert np.array_equal(t, np.transpose(t, (1, 0, 2)))
        assert np.array_equal(t, np.transpose(t, (2, 1, 0)))
        assert np.array_equal(t, np.transpose(t, (0, 2, 1)))

    def test_grid_form_generic_models(self):
        # mixed model kinds take the generic route; spot check one entry
        pump, trip = _matched_pair(beta_p=0.0, beta_f=2e-27)
        omegas = np.linspace(2.0e15, 4.0e15, 30)
        pump_tab = TabulatedDispersion(omegas, pump.wavenumber(omegas) * C_VACUUM / omegas)
        grid = FrequencyGrid(0.95e15, 1.05e15, 5)
        got = mismatch_on_grid(pump_tab, trip, grid)
        w = grid.omegas
        expect = phase_mismatch(pump_tab, trip, w[0], w[2], w[4])
        assert got[0, 2, 4] == pytest.approx(expect, rel=1e-9, abs=1e-7)


class TestQuadric:
    def test_closed_form(self):
        q = mismatch_quadric(length=0.3, beta_pump=6.4e-27, beta_triplet=2.19e-26)
        scale = 0.3 / 4.0
        assert q.eigenvalues[0] == pytest.approx(
            scale * (3 * 6.4e-27 - 2.19e-26), rel=1e-12)
        assert q.eigenvalues[1] == q.eigenvalues[2]
        assert q.eigenvalues[1] == pytest.approx(-scale * 2.19e-26, rel=1e-12)
        # collective axis stays negative for these coefficients
        assert q.eigenvalues[0] < 0
        assert np.allclose(q.axes[:, 0], np.ones(3) / np.sqrt(3))

    def test_isotropic_when_pump_flat(self):
        q = mismatch_quadric(length=0.5, beta_pump=0.0, beta_triplet=1e-26)
        assert q.eigenvalues[0] == pytest.approx(q.eigenvalues[1], rel=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_numeric_eigendecomposition(self, seed):
        rng = np.random.default_rng(seed)
        bp = rng.uniform(-3e-26, 3e-26)
        bf = rng.uniform(1e-27, 3e-26)
        length = rng.uniform(0.01, 1.0)
        q = mismatch_quadric(length, bp, bf)
        vals = np.sort(np.linalg.eigvalsh(q.matrix))
        mine = np.sort(np.asarray(q.eigenvalues))
        assert np.allclose(vals, mine, rtol=1e-10, atol=1e-40)

    def test_axes_diagonalize(self):
        q = mismatch_quadric(0.3, 6.4e-27, 2.19e-26)
        d = q.axes.T @ q.matrix @ q.axes
        off = d - np.diag(np.diag(d))
        assert np.max(np.abs(off)) <= 1e-12 * np.max(np.abs(np.diag(d)))
        assert np.allclose(q.axes.T @ q.axes, np.eye(3), atol=1e-14)

    def test_invalid_length(self):
        with pytest.raises(InvalidLength):
            mismatch_quadric(0.0, 1e-27, 1e-27)


class TestBandwidth:
    def test_known_value(self):
        # 21.9 fs^2/mm = 2.19e-26 s^2/m over 0.3 m
        got = phase_matching_bandwidth(0.3, 2.19e-26)
        assert got == pytest.approx(0.43e14, rel=0.02)
        assert got == pytest.approx(43734306799429.92, rel=1e-12)

    def test_unit_construction(self):
        assert phase_matching_bandwidth(1.0, 4.0 * np.pi) == pytest.approx(1.0, rel=1e-14)

    def test_length_scaling(self):
        a = phase_matching_bandwidth(0.1, 1e-26)
        b = phase_matching_bandwidth(0.4, 1e-26)
        assert a == pytest.approx(2.0 * b, rel=1e-12)

    def test_sign_insensitive(self):
        assert phase_matching_bandwidth(0.3, -2.19e-26) == \
            phase_matching_bandwidth(0.3, 2.19e-26)

    def test_errors(self):
        with pytest.raises(InvalidLength):
            phase_matching_bandwidth(-1.0, 1e-26)
        with pytest.raises(ZeroDispersion):
            phase_matching_bandwidth(0.3, 0.0)


class TestDerivatives:
    def test_taylor_exact(self):
        m = TaylorDispersion(center_omega=2e15, k0=1e7,
                             inv_group_velocity=5e-9, gvd_s2_per_m=1e-26)
        assert inv_group_velocity(m, 2.1e15) == pytest.approx(
            5e-9 + 1e-26 * 1e14, rel=1e-14)
        assert gvd(m, 1.7e15) == 1e-26

    def test_finite_difference_consistency(self):
        si = SellmeierDispersion(fused_silica())
        w = 2.0 * np.pi * C_VACUUM / 1.376e-6
        # halving the step barely moves a second-order estimate of a
        # smooth curve
        assert inv_group_velocity(si, w) == pytest.approx(
            inv_group_velocity(si, w, step=5e10), rel=1e-6)
        assert gvd(si, w) == pytest.approx(gvd(si, w, step=5e10), rel=1e-3)

    def test_group_index_magnitude(self):
        # group index of silica in the near infrared sits a bit above
        # the phase index; sanity bound, not a precision claim
        si = SellmeierDispersion(fused_silica())
        w = 2.0 * np.pi * C_VACUUM / 1.376e-6
        n_g = inv_group_velocity(si, w) * C_VACUUM
        assert 1.4 < n_g < 1.5


class TestPhaseMatchingSearch:
    def test_planted_root(self):
        # distinct group slopes make the degenerate mismatch a straight
        # line through zero at exactly 1e15 rad/s
        pump = TaylorDispersion(center_omega=3e15, k0=3e7,
                                inv_group_velocity=5e-9, gvd_s2_per_m=0.0)
        trip = TaylorDispersion(center_omega=1e15, k0=1e7,
                                inv_group_velocity=4.9e-9, gvd_s2_per_m=0.0)
        lam_f = 2.0 * np.pi * C_VACUUM / 1e15
        point = find_degenerate_phase_matching(pump, trip, lam_f * 0.9, lam_f * 1.1)
        assert point.omega_triplet == pytest.approx(1e15, rel=1e-9)
        assert abs(point.mismatch_residual) < 1e-6
        assert point.group_velocity_mismatch == pytest.approx(1e-10, rel=1e-9)
        assert point.lambda_triplet_m == pytest.approx(lam_f, rel=1e-9)

    def test_no_sign_change(self):
        # normally dispersive bulk glass cannot match 3w against w: the
        # short-wavelength index is always larger
        si = SellmeierDispersion(fused_silica())
        with pytest.raises(NoSignChange):
            find_degenerate_phase_matching(si, si, 1.3e-6, 1.45e-6)

    def test_bad_bracket(self):
        si = SellmeierDispersion(fused_silica())
        with pytest.raises(ValueError):
            find_degenerate_phase_matching(si, si, 1.45e-6, 1.3e-6)

    def test_engineered_table(self):
        # pump table built so 3 k_t is crossed with slope 3 * 2e-8 at a
        # frequency that is exactly a table node, keeping the planted
        # root free of interpolation bias
        w_root = 1.2e15
        trip = TaylorDispersion(center_omega=w_root, k0=1.1e7,
                                inv_group_velocity=4.8e-9, gvd_s2_per_m=2e-26)
        h = 5e13
        omegas = 3.0 * w_root + h * np.arange(-10, 11)
        slope = 2e-8
        k_p = 3.0 * trip.wavenumber(omegas / 3.0) + slope * (omegas - 3.0 * w_root)
        pump = TabulatedDispersion(omegas, k_p * C_VACUUM / omegas)
        lam_root = 2.0 * np.pi * C_VACUUM / w_root
        point = find_degenerate_phase_matching(pump, trip,
                                               lam_root * 0.95, lam_root * 1.05)
        assert point.omega_triplet == pytest.approx(w_root, rel=1e-9)
