"""Blind recovery of pure component spectra from hyperspectral mixtures.

Second-order blind source separation (AMUSE) followed by histogram-baseline
peak-direction correction of the recovered spectra.
"""

from .amuse import (
    CenteredCube,
    SubspaceSplit,
    UnmixingModel,
    Whitener,
    amuse,
    center,
    covariance_zero_lag,
    delayed_covariance,
    estimate_mixing,
    estimate_sources,
    rotation_from_delayed,
    signal_subspace,
    whiten,
)
from .errors import (
    DimensionError,
    IllSeparatedSubspaceWarning,
    NonIdentifiableDelayWarning,
    SeparationWarning,
    SingularMatrixError,
    SingularSubspaceError,
    UndefinedCorrelationError,
)
from .evaluation import (
    ConcentrationProfile,
    MatchResult,
    align,
    amari_index,
    column_cosines,
    concentration_profiles,
    correlation_matrix,
    match_sources,
    sign_accuracy,
)
from .sign_correction import (
    ExtremaSet,
    Histogram,
    SignVerdict,
    baseline,
    correct_signs,
    find_extrema,
    histogram,
    judge_direction,
    judge_spectrum,
)
from .spectra_model import (
    HyperspectralCube,
    MixingMatrix,
    NoiseSpec,
    PeakModel,
    Spectrum,
    WavelengthGrid,
    mix,
    noise_for_snr,
    paper_three_component_matrix,
    paper_two_component_matrix,
    synth_spectrum,
)

__version__ = "0.1.0"
