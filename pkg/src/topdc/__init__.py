"""Triphoton source modeling: spectral amplitudes, mode structure, detection.

The package builds the three-photon joint spectral amplitude of a
waveguide or microring source, quantifies its spectral separability
through the single-photon reduced density matrix, and optimizes
homodyne detection against it.  See the README for the command line
interface and file formats.
"""

from .config import RunConfig, SweepConfig, DetectionConfig, config_hash
from .detection import (
    LocalOscillator,
    OptimizerReport,
    SplitterColumn,
    eta_gradient,
    lo_from_mode,
    optimize_lo_basinhopping,
    optimize_lo_gd,
    overlap_eta,
    quadrature_moments,
    quadrature_pdf,
    random_lo,
    splitter_coincidence,
)
from .dispersion import (
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
    mismatch_quadric,
    phase_matching_bandwidth,
    phase_mismatch,
)
from .errors import ConfigError, TopdcError
from .grids import FrequencyGrid, HermitianMatrix, SpectralTensor
from .jsa import (
    Jsa,
    Pump,
    RingResonance,
    RingSource,
    WaveguideSource,
    apply_filter,
    build_ring_jsa,
    build_waveguide_jsa,
    field_enhancement,
    pump_envelope,
    ring_grid,
    spectral_projection,
    waveguide_grid,
)
from .pipeline import (
    RunSummary,
    SweepRow,
    build_configured_jsa,
    report_rate,
    run,
    sweep_pulse_duration,
    sweep_pump_bandwidth,
    sweep_pump_wavelength,
)
from .presets import load_preset, load_preset_dict, preset_names
from .separability import (
    ModeDecomposition,
    ReducedDensity,
    concurrence,
    pseudo_schmidt,
    reduced_density_matrix,
    schmidt_number,
    symplectic_excess,
)

__version__ = "0.1.0"
