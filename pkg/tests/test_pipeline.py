"""End-to-end runs, sweeps, and the export contract."""

import csv
import json
from types import SimpleNamespace

import numpy as np
import pytest

from topdc.config import RunConfig
from topdc.dispersion import C_VACUUM, gvd, phase_matching_bandwidth
from topdc.errors import ConfigError
from topdc.io import sha256_file
from topdc.jsa import spectral_projection
from topdc.pipeline import (
    MODE_COUNT_THRESHOLD,
    SweepRow,
    build_configured_jsa,
    report_rate,
    run,
    sweep_pulse_duration,
    sweep_pump_bandwidth,
    sweep_pump_wavelength,
    write_sweep,
)
from topdc.presets import load_preset_dict
from topdc.separability import reduced_density_matrix, schmidt_number

# frozen by the module-level tests; run() must reproduce them bit for bit
IDEAL_KAPPA = 1.2419520541814415
IDEAL_CONCURRENCE = 0.882759169502041
IDEAL_EPS = 0.009661645596919798

RUN_FILES = {
    "projection.csv", "psi_slice.csv", "rho.csv", "fractions.csv",
    "metadata.json",
} | {f"mode_{m:03d}.csv" for m in range(10)}


def small_waveguide(n_points=41, detection=False):
    d = load_preset_dict("ideal-waveguide")
    d["grid"] = {"n_points": n_points}
    if not detection:
        d.pop("detection", None)
    return RunConfig.from_dict(d)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture(scope="module")
def ideal_run(ideal_config, tmp_path_factory):
    out = tmp_path_factory.mktemp("ideal-run")
    return run(ideal_config, out_dir=out), out


class TestRun:
    def test_summary_matches_module_results(self, ideal_run, ideal_md):
        summary, _ = ideal_run
        assert summary.schmidt_number == pytest.approx(IDEAL_KAPPA, rel=1e-12)
        assert summary.concurrence == pytest.approx(IDEAL_CONCURRENCE, rel=1e-12)
        assert summary.triplet_probability == pytest.approx(IDEAL_EPS**2, rel=1e-12)
        assert summary.mode_fractions[0] == pytest.approx(ideal_md.fractions[0],
                                                          rel=1e-12)
        expected = int(np.count_nonzero(ideal_md.fractions > MODE_COUNT_THRESHOLD))
        assert summary.mode_count == expected == 9

    def test_manifest_is_complete_and_correct(self, ideal_run):
        summary, out = ideal_run
        assert set(summary.files) == RUN_FILES | {"lo.csv", "lo_report.json"}
        for name, digest in summary.files.items():
            assert sha256_file(out / name) == digest, name

    def test_summary_file_round_trips(self, ideal_run):
        summary, out = ideal_run
        assert json.loads((out / "summary.json").read_text()) == summary.to_dict()

    def test_metadata_contents(self, ideal_run, ideal_config):
        summary, out = ideal_run
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["config_hash"] == summary.config_hash
        assert meta["config"] == ideal_config.canonical
        assert meta["grid"]["n_points"] == 101
        assert meta["triplet_probability"] == pytest.approx(
            summary.triplet_probability, rel=1e-15)

    def test_detection_report(self, ideal_run):
        summary, out = ideal_run
        lo = summary.lo
        assert lo is not None and lo["converged"]
        assert 0.85 < lo["eta"] <= 1.0
        assert lo["grad_norm"] <= 1e-5
        assert lo["seed"] in (1, 2)
        assert json.loads((out / "lo_report.json").read_text()) == lo
        header, rows = read_csv(out / "lo.csv")
        assert header == ["omega", "re_g", "im_g"]
        assert len(rows) == 101

    def test_projection_export_is_exact(self, ideal_run, ideal_jsa):
        _, out = ideal_run
        header, rows = read_csv(out / "projection.csv")
        assert header == ["omega1", "omega2", "value"]
        n = ideal_jsa.grid.n_points
        got = np.array([float(r[2]) for r in rows]).reshape(n, n)
        assert np.array_equal(got, spectral_projection(ideal_jsa))
        omegas = np.array([float(r[0]) for r in rows]).reshape(n, n)
        assert np.array_equal(omegas[:, 0], ideal_jsa.grid.omegas)

    def test_rerun_is_byte_identical(self, ideal_run, ideal_config, tmp_path):
        first, out_a = ideal_run
        second = run(ideal_config, out_dir=tmp_path)
        assert second.files == first.files
        for name in ("summary.json", "metadata.json", "projection.csv"):
            assert (tmp_path / name).read_bytes() == (out_a / name).read_bytes()

    def test_run_without_detection(self, tmp_path):
        summary = run(small_waveguide(n_points=21), out_dir=tmp_path)
        assert summary.lo is None
        assert set(summary.files) == RUN_FILES
        assert not (tmp_path / "lo.csv").exists()


class TestSweeps:
    def test_bandwidth_point_matches_direct(self):
        cfg = small_waveguide()
        rows = sweep_pump_bandwidth(cfg, [1.25], workers=1)
        assert rows[0].value == 1.25 and rows[0].error == ""

        src = cfg.source
        ref = phase_matching_bandwidth(
            src.length, abs(gvd(src.triplet_model, src.pump.omega_center / 3.0)))
        d = load_preset_dict("ideal-waveguide")
        d["grid"] = {"n_points": 41}
        d["source"]["pump_pulse"]["sigma_rad_s"] = 1.25 * ref
        direct = schmidt_number(reduced_density_matrix(
            build_configured_jsa(RunConfig.from_dict(d))))
        assert rows[0].schmidt_number == pytest.approx(direct, rel=1e-12)

    def test_row_error_capture(self):
        rows = sweep_pump_bandwidth(small_waveguide(), [1.0, -2.0], workers=1)
        assert rows[0].error == "" and rows[0].schmidt_number > 1.0
        assert rows[1].schmidt_number is None
        assert rows[1].error.startswith("ConfigError")

    def test_worker_count_does_not_change_rows(self):
        cfg = small_waveguide()
        serial = sweep_pump_bandwidth(cfg, [0.8, 1.0, 1.3], workers=1)
        pooled = sweep_pump_bandwidth(cfg, [0.8, 1.0, 1.3], workers=2)
        for a, b in zip(serial, pooled):
            assert a.value == b.value
            assert a.schmidt_number == b.schmidt_number
            assert a.error == b.error

    def test_wavelength_sweep_symmetric_about_center(self):
        # group velocity matched source, no pump dispersion: equal and
        # opposite pump detunings must give the same mode count
        cfg = small_waveguide()
        w0 = 2.0 * np.pi * C_VACUUM / 4.587e-7
        delta = 0.004 * w0
        lams = [4.587e-7,
                2.0 * np.pi * C_VACUUM / (w0 + delta),
                2.0 * np.pi * C_VACUUM / (w0 - delta)]
        k0, km, kp = [r.schmidt_number
                      for r in sweep_pump_wavelength(cfg, lams, workers=1)]
        assert km == pytest.approx(kp, rel=1e-9)
        assert abs(km - k0) / k0 > 1e-4

    def test_pulse_duration_sweep_on_ring(self):
        d = load_preset_dict("ring-equal-q")
        d["grid"] = {"n_points": 61}
        cfg = RunConfig.from_dict(d)
        rows = sweep_pulse_duration(cfg, [1e-13, 1e-12, 1e-9], workers=1)
        ks = [r.schmidt_number for r in rows]
        assert all(r.error == "" for r in rows)
        assert all(k >= 1.0 - 1e-12 for k in ks)
        # short pulses sit on a plateau set by the pump resonance width
        assert ks[1] == pytest.approx(ks[0], rel=1e-6)
        # a quasi-continuous pump resolves the sum-frequency line instead
        assert ks[2] - ks[1] > 1e-4

    def test_sweep_requires_matching_source_kind(self):
        ring = RunConfig.from_dict(load_preset_dict("ring-equal-q"))
        with pytest.raises(ConfigError) as err:
            sweep_pump_bandwidth(ring, [1.0])
        assert err.value.field == "sweep.parameter"
        with pytest.raises(ConfigError) as err:
            sweep_pulse_duration(small_waveguide(), [1e-12])
        assert err.value.field == "sweep.parameter"


class TestSweepExport:
    def test_table_and_metadata(self, tmp_path):
        cfg = small_waveguide()
        rows = [SweepRow(value=1.0, schmidt_number=1.25),
                SweepRow(value=2.0, schmidt_number=None, error="Boom: no")]
        table = write_sweep(tmp_path, cfg, "pump_sigma", rows)
        assert table == tmp_path / "sweep.csv"

        header, body = read_csv(table)
        assert header == ["value", "schmidt_number", "error"]
        assert body[0] == ["1", "1.25", ""]
        assert body[1] == ["2", "", "Boom: no"]

        meta = json.loads((tmp_path / "sweep_metadata.json").read_text())
        assert meta["parameter"] == "pump_sigma"
        assert meta["values"] == [1.0, 2.0]
        assert meta["config"] == cfg.canonical


class TestReportRate:
    def test_scalar_probability(self):
        assert report_rate(1e-11, 1e7) == pytest.approx(1e-4, rel=1e-15)
        assert report_rate(0.0, 1e9) == 0.0

    def test_summary_like_object(self):
        s = SimpleNamespace(triplet_probability=2e-10)
        assert report_rate(s, 5e6) == pytest.approx(1e-3, rel=1e-15)

    def test_linearity(self):
        one = report_rate(3.3e-9, 8e7)
        assert report_rate(3.3e-9, 1.6e8) == pytest.approx(2.0 * one, rel=1e-15)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            report_rate(-1e-9, 1e7)
        with pytest.raises(ValueError):
            report_rate(1e-9, -1.0)
