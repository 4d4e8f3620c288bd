"""Vibration-induced phase noise of a rail-mounted three-grating atom interferometer."""

from .beam import (
    BendingMode,
    CrossSection,
    Material,
    ModalSolution,
    RailSpec,
    dispersion_kappa,
    find_bending_modes,
    mode_damping_from_q,
    mode_q_factors,
    pendular_q_factors,
)
from .errors import (
    ConfigError,
    DomainError,
    FitError,
    RailNoiseError,
    ResonanceSingularityError,
    SolverError,
    SpectrumFormatError,
    UnsupportedConfigurationError,
)
from .noise import NoiseSpectrum, load_spectrum, sample_psd, save_spectrum, synth_spectrum
from .phase import (
    GridSpec,
    InterferometerSpec,
    PhaseNoiseResult,
    optical_phase,
    phase_noise_spectrum,
    phase_transfer,
    phase_transfer_exact,
    phase_transfer_lowfreq,
    rms_bending,
)
from .suspension import (
    SuspensionEnd,
    SuspensionSpec,
    amplitudes_lowfreq,
    boundary_coefficients,
    pendular_modes,
    ratio_R,
    shape,
    solve_amplitudes,
)
from .visibility import VisibilityModel, fit_visibility, visibility

__version__ = "0.1.0"
