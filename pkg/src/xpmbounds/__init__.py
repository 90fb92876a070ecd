"""Fidelity bounds for XPM conditional-phase gates under group-velocity walk-off.

The package computes every bound analytically where a closed form exists
(two-pole response family) and by adaptive quadrature otherwise (tabulated
measured responses, finite-width pulses), and cross-checks the analytic
phase-noise factors by Monte Carlo sampling of the underlying Gaussian
noise process.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DataValidationError,
    DivergentMomentError,
    PoleError,
    XpmBoundsError,
)
from .fidelity import (
    FidelityReport,
    GateGeometry,
    f0_nonuniform_bound,
    f0_uniform_bound,
    f1max_nonuniform,
    fmax,
    induced_phase_profile,
    phase_shift_exponent,
    phase_variance,
    pmp_cascade_bound,
    uniform_conditions,
)
from .phasenoise import (
    NoiseEnsemble,
    NoiseSpectrum,
    estimate_char,
    estimate_coherence,
    sample_process,
)
from .pulses import (
    DiracPulse,
    GaussianPulse,
    PulseShape,
    TabulatedPulse,
    pulse_window,
    shifted,
)
from .response import (
    ResponseMetrics,
    TabulatedResponse,
    TwoPoleParams,
    TwoPoleResponse,
    cumulative_h,
    him_l1,
    load_tabulated,
    rms_duration,
    two_pole_H,
    two_pole_h,
)
from .sweep import (
    Axis,
    GammaSweepTable,
    HeatMap,
    PeakInfo,
    SweepSpec,
    find_peak,
    gamma_sweep,
    heatmap_f1,
    refine_peak,
)

__all__ = [
    "__version__",
    "XpmBoundsError",
    "ConfigurationError",
    "DataValidationError",
    "ConvergenceError",
    "PoleError",
    "DivergentMomentError",
    "TwoPoleParams",
    "TwoPoleResponse",
    "TabulatedResponse",
    "ResponseMetrics",
    "two_pole_h",
    "two_pole_H",
    "cumulative_h",
    "rms_duration",
    "him_l1",
    "load_tabulated",
    "DiracPulse",
    "GaussianPulse",
    "TabulatedPulse",
    "PulseShape",
    "shifted",
    "pulse_window",
    "GateGeometry",
    "FidelityReport",
    "phase_shift_exponent",
    "induced_phase_profile",
    "uniform_conditions",
    "phase_variance",
    "f0_uniform_bound",
    "f0_nonuniform_bound",
    "fmax",
    "f1max_nonuniform",
    "pmp_cascade_bound",
    "NoiseSpectrum",
    "NoiseEnsemble",
    "sample_process",
    "estimate_char",
    "estimate_coherence",
    "Axis",
    "SweepSpec",
    "GammaSweepTable",
    "HeatMap",
    "PeakInfo",
    "gamma_sweep",
    "heatmap_f1",
    "find_peak",
    "refine_peak",
]
