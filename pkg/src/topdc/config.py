"""Run configuration: JSON parsing, validation, canonical form, hashing.

A configuration is a single JSON document.  Validation resolves every
shorthand (pulse duration to spectral width, resonance wavelength to
frequency, default resonance placement) into a fully explicit canonical
dictionary; the run hash is taken over that canonical form, so two
configurations that mean the same run hash the same.  Execution details
(output directory, worker count) stay outside the hash.

Source section, one of:

    {"kind": "waveguide", "length_m", "coupling",
     "pump_pulse": {"wavelength_m", "energy_j", "fwhm_s" | "sigma_rad_s"},
     "pump_dispersion": <model>, "triplet_dispersion": <model>}

    {"kind": "ring", "circumference_m", "coupling",
     "pump_pulse": {...},
     "pump_resonance": {"q_factor", "wavelength_m" | "omega_rad_s"?},
     "triplet_resonance": {...}}

Dispersion models: {"kind": "taylor", "center_omega_rad_s", "k0_per_m",
"inv_group_velocity_s_per_m", "gvd_s2_per_m"}, {"kind": "sellmeier",
"material", "fraction"?}, or {"kind": "table", "path"}.  Resonances
default to the pump pulse frequency and one third of the pump resonance
respectively.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dispersion import (
    C_VACUUM,
    SellmeierDispersion,
    TabulatedDispersion,
    TaylorDispersion,
    fused_silica,
    geo2_doped_silica,
    geo2_glass,
)
from .errors import ConfigError
from .io import canonical_hash
from .jsa import HBAR, Pump, RingResonance, RingSource, WaveguideSource

__all__ = [
    "DetectionConfig",
    "SweepConfig",
    "RunConfig",
    "config_hash",
    "resolve_workers",
    "SWEEP_PARAMETERS",
    "WORKERS_ENV",
]

SWEEP_PARAMETERS = ("pump_sigma", "pump_lambda", "pulse_duration")
WORKERS_ENV = "TOPDC_WORKERS"
DEFAULT_OUTPUT_DIR = "topdc-out"


def _expect_map(v, path):
    if not isinstance(v, dict):
        raise ConfigError(path, f"expected an object, got {type(v).__name__}")
    return v


def _get(d, key, path, default=None, required=False):
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    return d[key]


def _number(v, path, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    x = float(v)
    if not np.isfinite(x):
        raise ConfigError(path, f"must be finite, got {v!r}")
    if positive and x <= 0.0:
        raise ConfigError(path, f"must be positive, got {v!r}")
    return x


def _integer(v, path, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {v}")
    return v


def _complex_value(v, path):
    """Coupling constants: a plain number or a [re, im] pair."""
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(float(v), 0.0)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(_number(v[0], f"{path}[0]"), _number(v[1], f"{path}[1]"))
    raise ConfigError(path, f"expected a number or [re, im] pair, got {v!r}")


def _window(v, path):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(path, f"expected [low, high], got {v!r}")
    lo = _number(v[0], f"{path}[0]")
    hi = _number(v[1], f"{path}[1]")
    if not hi > lo:
        raise ConfigError(path, f"high bound must exceed low bound, got {v!r}")
    return (lo, hi)


_SELLMEIER_MATERIALS = {
    "fused_silica": lambda frac: fused_silica(),
    "geo2_glass": lambda frac: geo2_glass(),
    "geo2_doped_silica": geo2_doped_silica,
}


def _parse_dispersion(v, path, base_dir):
    d = _expect_map(v, path)
    kind = _get(d, "kind", path, required=True)
    if kind == "taylor":
        model = TaylorDispersion(
            center_omega=_number(_get(d, "center_omega_rad_s", path, required=True),
                                 f"{path}.center_omega_rad_s", positive=True),
            k0=_number(_get(d, "k0_per_m", path, required=True), f"{path}.k0_per_m"),
            inv_group_velocity=_number(
                _get(d, "inv_group_velocity_s_per_m", path, required=True),
                f"{path}.inv_group_velocity_s_per_m"),
            gvd_s2_per_m=_number(_get(d, "gvd_s2_per_m", path, required=True),
                                 f"{path}.gvd_s2_per_m"),
        )
        canonical = {
            "kind": "taylor",
            "center_omega_rad_s": model.center_omega,
            "k0_per_m": model.k0,
            "inv_group_velocity_s_per_m": model.inv_group_velocity,
            "gvd_s2_per_m": model.gvd_s2_per_m,
        }
        return model, canonical
    if kind == "sellmeier":
        name = _get(d, "material", path, required=True)
        if name not in _SELLMEIER_MATERIALS:
            known = ", ".join(sorted(_SELLMEIER_MATERIALS))
            raise ConfigError(f"{path}.material", f"unknown material {name!r}; known: {known}")
        canonical = {"kind": "sellmeier", "material": name}
        frac = None
        if name == "geo2_doped_silica":
            frac = _number(_get(d, "fraction", path, required=True),
                           f"{path}.fraction", positive=True)
            canonical["fraction"] = frac
        try:
            material = _SELLMEIER_MATERIALS[name](frac)
        except ValueError as e:
            raise ConfigError(f"{path}.fraction", str(e)) from None
        return SellmeierDispersion(material), canonical
    if kind == "table":
        rel = _get(d, "path", path, required=True)
        if not isinstance(rel, str):
            raise ConfigError(f"{path}.path", f"expected a string, got {rel!r}")
        full = Path(rel)
        if not full.is_absolute() and base_dir is not None:
            full = Path(base_dir) / full
        try:
            model = TabulatedDispersion.from_csv(full)
        except (OSError, ValueError) as e:
            raise ConfigError(f"{path}.path", f"{full}: {e}") from None
        return model, {"kind": "table", "path": rel}
    raise ConfigError(f"{path}.kind", f"unknown dispersion kind {kind!r}")


def _parse_pump(v, path):
    d = _expect_map(v, path)
    lam = _number(_get(d, "wavelength_m", path, required=True),
                  f"{path}.wavelength_m", positive=True)
    energy = _number(_get(d, "energy_j", path, required=True),
                     f"{path}.energy_j", positive=True)
    has_fwhm = "fwhm_s" in d
    has_sigma = "sigma_rad_s" in d
    if has_fwhm == has_sigma:
        raise ConfigError(path, "give exactly one of fwhm_s or sigma_rad_s")
    if has_sigma:
        sigma = _number(d["sigma_rad_s"], f"{path}.sigma_rad_s", positive=True)
    else:
        fwhm = _number(d["fwhm_s"], f"{path}.fwhm_s", positive=True)
        sigma = 2.0 * np.sqrt(np.log(2.0)) / fwhm
    omega = 2.0 * np.pi * C_VACUUM / lam
    pump = Pump(omega_center=omega, sigma=sigma, photon_number=energy / (HBAR * omega))
    canonical = {"wavelength_m": lam, "sigma_rad_s": sigma, "energy_j": energy}
    return pump, canonical


def _parse_resonance(v, path, default_omega):
    d = _expect_map(v, path) if v is not None else {}
    q = _number(_get(d, "q_factor", path, required=True), f"{path}.q_factor", positive=True)
    if "omega_rad_s" in d and "wavelength_m" in d:
        raise ConfigError(path, "give omega_rad_s or wavelength_m, not both")
    if "omega_rad_s" in d:
        omega = _number(d["omega_rad_s"], f"{path}.omega_rad_s", positive=True)
    elif "wavelength_m" in d:
        lam = _number(d["wavelength_m"], f"{path}.wavelength_m", positive=True)
        omega = 2.0 * np.pi * C_VACUUM / lam
    else:
        omega = default_omega
    mag = _number(_get(d, "coupling_magnitude", path, default=1.0),
                  f"{path}.coupling_magnitude", positive=True)
    res = RingResonance(omega_res=omega, q_factor=q, coupling_magnitude=mag)
    canonical = {"omega_rad_s": omega, "q_factor": q, "coupling_magnitude": mag}
    return res, canonical


def _parse_source(v, base_dir):
    d = _expect_map(v, "source")
    kind = _get(d, "kind", "source", required=True)
    coupling = _complex_value(_get(d, "coupling", "source", required=True), "source.coupling")
    pump, pump_c = _parse_pump(_get(d, "pump_pulse", "source", required=True),
                               "source.pump_pulse")
    if kind == "waveguide":
        length = _number(_get(d, "length_m", "source", required=True),
                         "source.length_m", positive=True)
        pmod, pmod_c = _parse_dispersion(_get(d, "pump_dispersion", "source", required=True),
                                         "source.pump_dispersion", base_dir)
        tmod, tmod_c = _parse_dispersion(_get(d, "triplet_dispersion", "source", required=True),
                                         "source.triplet_dispersion", base_dir)
        source = WaveguideSource(length=length, coupling=coupling,
                                 pump_model=pmod, triplet_model=tmod, pump=pump)
        canonical = {
            "kind": "waveguide",
            "length_m": length,
            "coupling": [coupling.real, coupling.imag],
            "pump_pulse": pump_c,
            "pump_dispersion": pmod_c,
            "triplet_dispersion": tmod_c,
        }
        return source, canonical
    if kind == "ring":
        circ = _number(_get(d, "circumference_m", "source", required=True),
                       "source.circumference_m", positive=True)
        pres, pres_c = _parse_resonance(_get(d, "pump_resonance", "source", required=True),
                                        "source.pump_resonance", pump.omega_center)
        tres, tres_c = _parse_resonance(_get(d, "triplet_resonance", "source", required=True),
                                        "source.triplet_resonance", pres.omega_res / 3.0)
        source = RingSource(circumference=circ, coupling=coupling,
                            pump_resonance=pres, triplet_resonance=tres, pump=pump)
        canonical = {
            "kind": "ring",
            "circumference_m": circ,
            "coupling": [coupling.real, coupling.imag],
            "pump_pulse": pump_c,
            "pump_resonance": pres_c,
            "triplet_resonance": tres_c,
        }
        return source, canonical
    raise ConfigError("source.kind", f"unknown source kind {kind!r}")


@dataclass(frozen=True)
class DetectionConfig:
    optimizer: str
    seeds: int = 1
    rng_seed: int = 0
    tol: float = 1e-6
    n_hops: int = 20
    perturb_scale: float = 0.1

    def canonical(self) -> dict:
        out = {
            "optimizer": self.optimizer,
            "seeds": self.seeds,
            "rng_seed": self.rng_seed,
            "tol": self.tol,
        }
        if self.optimizer == "bh":
            out["n_hops"] = self.n_hops
            out["perturb_scale"] = self.perturb_scale
        return out


@dataclass(frozen=True)
class SweepConfig:
    parameter: str
    values: tuple


def _parse_detection(v):
    d = _expect_map(v, "detection")
    optimizer = _get(d, "optimizer", "detection", required=True)
    if optimizer not in ("gd", "bh"):
        raise ConfigError("detection.optimizer", f"expected 'gd' or 'bh', got {optimizer!r}")
    return DetectionConfig(
        optimizer=optimizer,
        seeds=_integer(_get(d, "seeds", "detection", default=1), "detection.seeds", minimum=1),
        rng_seed=_integer(_get(d, "rng_seed", "detection", default=0), "detection.rng_seed"),
        tol=_number(_get(d, "tol", "detection", default=1e-6), "detection.tol", positive=True),
        n_hops=_integer(_get(d, "n_hops", "detection", default=20), "detection.n_hops", minimum=0),
        perturb_scale=_number(_get(d, "perturb_scale", "detection", default=0.1),
                              "detection.perturb_scale", positive=True),
    )


def _parse_sweep(v):
    d = _expect_map(v, "sweep")
    parameter = _get(d, "parameter", "sweep", required=True)
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError("sweep.parameter",
                          f"expected one of {SWEEP_PARAMETERS}, got {parameter!r}")
    values = _get(d, "values", "sweep", required=True)
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values", "expected a nonempty list of numbers")
    vals = tuple(_number(x, f"sweep.values[{i}]", positive=True)
                 for i, x in enumerate(values))
    return SweepConfig(parameter=parameter, values=vals)


@dataclass(frozen=True)
class RunConfig:
    """Validated run description plus its canonical dictionary."""

    source: object
    n_points: int
    window: tuple | None
    filter_window: tuple | None
    detection: DetectionConfig | None
    sweep: SweepConfig | None
    output_dir: str
    workers: int | None
    canonical: dict
    base_dir: str | None = None

    @property
    def is_ring(self) -> bool:
        return isinstance(self.source, RingSource)

    @classmethod
    def from_dict(cls, raw: dict, base_dir=None) -> "RunConfig":
        d = _expect_map(raw, "config")
        known = {"source", "grid", "filter", "detection", "sweep", "output_dir", "workers"}
        for key in d:
            if key not in known:
                raise ConfigError(key, "unknown top-level field")
        source, source_c = _parse_source(_get(d, "source", "config", required=True), base_dir)

        grid = _expect_map(_get(d, "grid", "config", default={}), "grid")
        default_n = 161 if isinstance(source, RingSource) else 101
        n_points = _integer(_get(grid, "n_points", "grid", default=default_n),
                            "grid.n_points", minimum=2)
        window = grid.get("window")
        if window is not None:
            window = _window(window, "grid.window")

        filt = d.get("filter")
        if filt is not None:
            filt = _window(filt, "filter")

        detection = _parse_detection(d["detection"]) if d.get("detection") is not None else None
        sweep = _parse_sweep(d["sweep"]) if d.get("sweep") is not None else None

        output_dir = d.get("output_dir", DEFAULT_OUTPUT_DIR)
        if not isinstance(output_dir, str) or not output_dir:
            raise ConfigError("output_dir", f"expected a nonempty string, got {output_dir!r}")
        workers = d.get("workers")
        if workers is not None:
            workers = _integer(workers, "workers", minimum=1)

        canonical = {"source": source_c, "grid": {"n_points": n_points}}
        if window is not None:
            canonical["grid"]["window"] = [window[0], window[1]]
        if filt is not None:
            canonical["filter"] = [filt[0], filt[1]]
        if detection is not None:
            canonical["detection"] = detection.canonical()
        if sweep is not None:
            canonical["sweep"] = {"parameter": sweep.parameter,
                                  "values": list(sweep.values)}

        return cls(source=source, n_points=n_points, window=window, filter_window=filt,
                   detection=detection, sweep=sweep, output_dir=output_dir,
                   workers=workers, canonical=canonical,
                   base_dir=None if base_dir is None else str(base_dir))

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except OSError as e:
            raise ConfigError("config", f"cannot read {path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"{path} is not valid JSON: {e}") from None
        return cls.from_dict(raw, base_dir=path.parent)


def config_hash(cfg: RunConfig) -> str:
    """Hash of the canonical configuration; execution details excluded."""
    return canonical_hash(cfg.canonical)


def resolve_workers(cfg: RunConfig | None = None) -> int:
    """Worker count: config beats the environment beats the machine."""
    if cfg is not None and cfg.workers is not None:
        return cfg.workers
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError("workers", f"{WORKERS_ENV}={env!r} is not an integer") from None
        if value < 1:
            raise ConfigError("workers", f"{WORKERS_ENV} must be at least 1, got {value}")
        return value
    return os.cpu_count() or 1
