"""Fisher information of a coherent + squeezed-vacuum interferometer read out
by photon counters with a finite number-resolution threshold."""

from .errors import (
    CutoffOverflow,
    DegenerateLikelihood,
    DomainError,
    InsufficientData,
    MzFisherError,
    SizeExceeded,
    ZeroProbability,
)
from .fisher import (
    ApproxParams,
    FisherReport,
    asymptotic_constant,
    cfi_per_n_analytic,
    cfi_per_n_general_phase,
    cfi_per_n_numeric,
    qfi_per_n_operator_oracle,
    total_fisher_approx,
    total_fisher_exact,
    total_fisher_ideal,
    truncated_total_qfi,
)
from .numerics import LogSigned, erfc, log_factorial, log_sum_exp
from .optimize import (
    PowerLawFit,
    ScanResult,
    fit_power_law,
    optimize_alpha,
    optimize_single_component,
    scaling_scan,
)
from .rotation import (
    DickeIndex,
    OutcomeDistribution,
    RotationBlock,
    conditional_probabilities,
    full_outcome_distribution,
    probability_derivatives,
    wigner_d_block,
)
from .simulate import ClickRecord, EstimationRun, crb_experiment, mle_estimate, sample_clicks
from .states import (
    AmplitudeTable,
    LightSource,
    NPhotonState,
    build_amplitude_table,
    coherent_amplitude,
    generation_probability,
    postselect,
    squeezed_amplitude,
    squeezed_number_distribution,
)

__version__ = "0.1.0"
