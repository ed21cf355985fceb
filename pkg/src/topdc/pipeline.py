"""End-to-end drivers: single runs, parameter sweeps, file exports.

``run`` executes the full chain source -> amplitude -> reduced density
matrix -> mode structure (-> oscillator optimization) and writes every
artifact with deterministic bytes.  Sweeps re-run a reduced chain (no
exports, no detection) per parameter value, in a process pool when more
than one worker is available, and record per-row errors instead of
aborting the table.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from copy import deepcopy
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DetectionConfig, RunConfig, config_hash, resolve_workers
from .detection import optimize_lo_basinhopping, optimize_lo_gd, random_lo
from .dispersion import gvd, phase_matching_bandwidth
from .errors import ConfigError
from .grids import FrequencyGrid
from .io import sha256_file, write_csv, write_json
from .jsa import (
    Jsa,
    RingSource,
    WaveguideSource,
    apply_filter,
    build_ring_jsa,
    build_waveguide_jsa,
    ring_grid,
    spectral_projection,
    waveguide_grid,
)
from .separability import (
    concurrence,
    pseudo_schmidt,
    reduced_density_matrix,
    schmidt_number,
    symplectic_excess,
)

__all__ = [
    "RunSummary",
    "SweepRow",
    "build_configured_jsa",
    "run",
    "sweep_pump_bandwidth",
    "sweep_pump_wavelength",
    "sweep_pulse_duration",
    "write_sweep",
    "report_rate",
]

N_MODE_EXPORTS = 10

# a mode "participates" when it carries more than this fraction of the state
MODE_COUNT_THRESHOLD = 1e-3


@dataclass
class RunSummary:
    """Scalar results of one run plus the manifest of written files."""

    schmidt_number: float
    concurrence: float
    mode_fractions: list
    mode_count: int
    symplectic_excesses: list
    triplet_probability: float
    config_hash: str
    lo: dict | None
    files: dict

    def to_dict(self) -> dict:
        return {
            "schmidt_number": self.schmidt_number,
            "concurrence": self.concurrence,
            "mode_fractions": self.mode_fractions,
            "mode_count": self.mode_count,
            "symplectic_excesses": self.symplectic_excesses,
            "triplet_probability": self.triplet_probability,
            "config_hash": self.config_hash,
            "lo": self.lo,
            "files": self.files,
        }


def build_configured_jsa(cfg: RunConfig) -> Jsa:
    """Amplitude for a validated configuration: grid, source, filter."""
    src = cfg.source
    if isinstance(src, WaveguideSource):
        if cfg.window is not None:
            grid = FrequencyGrid(cfg.window[0], cfg.window[1], cfg.n_points)
        else:
            grid = waveguide_grid(src, cfg.n_points)
        j = build_waveguide_jsa(src, grid)
    elif isinstance(src, RingSource):
        if cfg.window is not None:
            grid = FrequencyGrid(cfg.window[0], cfg.window[1], cfg.n_points)
        else:
            grid = ring_grid(src, cfg.n_points)
        j = build_ring_jsa(src, grid)
    else:
        raise ConfigError("source", f"unsupported source type {type(src).__name__}")
    if cfg.filter_window is not None:
        j = apply_filter(j, cfg.filter_window)
    return j


def _best_lo_report(j: Jsa, det: DetectionConfig):
    """Run the configured optimizer once per seed, keep the best result."""
    best = None
    best_seed = None
    for i in range(det.seeds):
        seed_value = det.rng_seed + i
        start = random_lo(j.grid, np.random.default_rng(seed_value))
        if det.optimizer == "gd":
            rep = optimize_lo_gd(j, start, tol=det.tol)
        else:
            rep = optimize_lo_basinhopping(
                j, start,
                n_hops=det.n_hops, perturb_scale=det.perturb_scale,
                rng_seed=seed_value, tol=det.tol,
            )
        if best is None or rep.magnitude > best.magnitude:
            best, best_seed = rep, seed_value
    payload = {
        "converged": bool(best.converged),
        "eta": float(best.magnitude),
        "grad_norm": float(best.gradient_norm),
        "iterations": int(best.iterations),
        "phase": float(np.angle(best.overlap)),
        "seed": int(best_seed),
    }
    return payload, best


def run(cfg: RunConfig, out_dir=None) -> RunSummary:
    """Full pipeline; writes all exports under the output directory."""
    out = Path(out_dir) if out_dir is not None else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    j = build_configured_jsa(cfg)
    rd = reduced_density_matrix(j)
    md = pseudo_schmidt(rd)
    spectrum = symplectic_excess(j.triplet_amplitude, md)

    lo_payload = None
    lo_best = None
    if cfg.detection is not None:
        lo_payload, lo_best = _best_lo_report(j, cfg.detection)

    files = {}

    def _record(path: Path):
        files[path.name] = sha256_file(path)

    o = j.grid.omegas
    n = j.grid.n_points

    proj = spectral_projection(j)
    _record(write_csv(out / "projection.csv", ("omega1", "omega2", "value"),
                      ((o[a], o[b], proj[a, b]) for a in range(n) for b in range(n))))

    mid = n // 2
    slab = np.abs(j.values[:, :, mid]) ** 2
    _record(write_csv(out / "psi_slice.csv", ("omega1", "omega2", "value"),
                      ((o[a], o[b], slab[a, b]) for a in range(n) for b in range(n))))

    rho = rd.values
    _record(write_csv(out / "rho.csv", ("omega1", "omega1_prime", "re", "im"),
                      ((o[a], o[b], rho[a, b].real, rho[a, b].imag)
                       for a in range(n) for b in range(n))))

    _record(write_csv(out / "fractions.csv", ("n", "r_n"),
                      ((m, md.fractions[m]) for m in range(n))))

    for m in range(min(N_MODE_EXPORTS, n)):
        col = md.modes[:, m]
        _record(write_csv(out / f"mode_{m:03d}.csv", ("omega", "re_f", "im_f"),
                          ((o[a], col[a].real, col[a].imag) for a in range(n))))

    if lo_best is not None:
        g = lo_best.lo.values
        _record(write_csv(out / "lo.csv", ("omega", "re_g", "im_g"),
                          ((o[a], g[a].real, g[a].imag) for a in range(n))))
        _record(write_json(out / "lo_report.json", lo_payload))

    digest = config_hash(cfg)
    metadata = {
        "config": cfg.canonical,
        "config_hash": digest,
        "grid": {
            "omega_min": j.grid.omega_min,
            "omega_max": j.grid.omega_max,
            "n_points": n,
        },
        "triplet_amplitude": j.triplet_amplitude,
        "triplet_probability": j.triplet_amplitude ** 2,
    }
    _record(write_json(out / "metadata.json", metadata))

    n_keep = min(N_MODE_EXPORTS, n)
    summary = RunSummary(
        schmidt_number=float(schmidt_number(rd)),
        concurrence=float(concurrence(rd)),
        mode_fractions=[float(x) for x in md.fractions[:n_keep]],
        mode_count=int(np.count_nonzero(md.fractions > MODE_COUNT_THRESHOLD)),
        symplectic_excesses=[float(x) for x in spectrum.excesses[:n_keep]],
        triplet_probability=float(j.triplet_amplitude ** 2),
        config_hash=digest,
        lo=lo_payload,
        files=files,
    )
    write_json(out / "summary.json", summary.to_dict())
    return summary


# ---------------------------------------------------------------------------
# sweeps

@dataclass
class SweepRow:
    value: float
    schmidt_number: float | None
    error: str = ""


def _vary_pump(canonical: dict, param: str, value: float) -> dict:
    d = deepcopy(canonical)
    d.pop("detection", None)
    d.pop("sweep", None)
    pulse = d["source"]["pump_pulse"]
    if param == "pump_sigma":
        pulse["sigma_rad_s"] = value
    elif param == "pump_lambda":
        pulse["wavelength_m"] = value
    elif param == "pulse_duration":
        pulse.pop("sigma_rad_s", None)
        pulse["fwhm_s"] = value
    else:
        raise ConfigError("sweep.parameter", f"unknown parameter {param!r}")
    return d


def _point_kappa(args):
    """Worker: effective mode count for one canonical variant.

    Any failure is folded into the row, not raised; sweeps must deliver
    one row per requested value.
    """
    variant, base_dir = args
    try:
        cfg = RunConfig.from_dict(variant, base_dir=base_dir)
        j = build_configured_jsa(cfg)
        return float(schmidt_number(reduced_density_matrix(j))), ""
    except Exception as e:  # noqa: BLE001 - per-row capture is the contract
        return None, f"{type(e).__name__}: {e}"


def _run_points(cfg: RunConfig, values, variants, workers=None) -> list:
    count = resolve_workers(cfg) if workers is None else workers
    args = [(v, cfg.base_dir) for v in variants]
    if count <= 1 or len(args) <= 1:
        results = [_point_kappa(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=min(count, len(args))) as pool:
            results = list(pool.map(_point_kappa, args))
    return [SweepRow(value=float(v), schmidt_number=k, error=err)
            for v, (k, err) in zip(values, results)]


def _require_kind(cfg: RunConfig, ring: bool, param: str):
    if cfg.is_ring != ring:
        need = "ring" if ring else "waveguide"
        raise ConfigError("sweep.parameter", f"{param} sweep requires a {need} source")


def sweep_pump_bandwidth(cfg: RunConfig, ratios, workers=None) -> list:
    """Mode count versus pump width in units of the phase-matched width."""
    _require_kind(cfg, ring=False, param="pump_sigma")
    src = cfg.source
    center = src.pump.omega_center / 3.0
    reference = phase_matching_bandwidth(src.length, abs(gvd(src.triplet_model, center)))
    variants = [_vary_pump(cfg.canonical, "pump_sigma", float(r) * reference)
                for r in ratios]
    return _run_points(cfg, ratios, variants, workers)


def sweep_pump_wavelength(cfg: RunConfig, wavelengths_m, workers=None) -> list:
    """Mode count versus pump center wavelength, dispersion held fixed."""
    _require_kind(cfg, ring=False, param="pump_lambda")
    variants = [_vary_pump(cfg.canonical, "pump_lambda", float(lam))
                for lam in wavelengths_m]
    return _run_points(cfg, wavelengths_m, variants, workers)


def sweep_pulse_duration(cfg: RunConfig, durations_s, workers=None) -> list:
    """Mode count versus pump pulse duration for a ring source."""
    _require_kind(cfg, ring=True, param="pulse_duration")
    variants = [_vary_pump(cfg.canonical, "pulse_duration", float(tau))
                for tau in durations_s]
    return _run_points(cfg, durations_s, variants, workers)


def write_sweep(out_dir, cfg: RunConfig, parameter: str, rows) -> Path:
    """Write sweep.csv plus a metadata stamp; returns the table path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = write_csv(
        out / "sweep.csv",
        ("value", "schmidt_number", "error"),
        ((r.value, "" if r.schmidt_number is None else r.schmidt_number, r.error)
         for r in rows),
    )
    write_json(out / "sweep_metadata.json", {
        "config": cfg.canonical,
        "config_hash": config_hash(cfg),
        "parameter": parameter,
        "values": [r.value for r in rows],
    })
    return table


def report_rate(summary, repetition_rate_hz: float) -> float:
    """Triplets per second at a given pulse repetition rate.

    Accepts a RunSummary or a bare per-pulse probability.
    """
    probability = float(getattr(summary, "triplet_probability", summary))
    if probability < 0.0 or repetition_rate_hz < 0.0:
        raise ValueError("probability and repetition rate must be nonnegative")
    return probability * repetition_rate_hz
