"""Qubit probes for classical Gaussian noise.

Single-qubit dephasing under stationary Gaussian fields (Ornstein-Uhlenbeck,
Gaussian, and power-law autocorrelations), the Fisher/quantum Fisher
information of the noise parameter, QSNR optimization over the interaction
time, and simulated maximum-likelihood estimation campaigns that check
Cramer-Rao saturation.

The hot numeric loops live in a compiled extension (``qprobe._core``) with a
NumPy fallback selected at import; ``qprobe.BACKEND`` names the active one.
"""
from ._backend import BACKEND
from .dynamics import (
    CoherenceEstimate,
    CovarianceFactorizationError,
    DephasedQubit,
    EigenSystem,
    ProbeState,
    TrajectoryEnsemble,
    coherence_monte_carlo,
    default_step,
    eigensystem,
    evolve,
    outcome_probabilities,
    sample_trajectories,
)
from .experiment import (
    CampaignConfig,
    CampaignRecord,
    CampaignResult,
    CampaignSummary,
    EstimateRecord,
    MeasurementSample,
    invert_probability,
    likelihood,
    mle_estimate,
    mle_variance,
    qcr_bound,
    run_campaign,
    simulate_measurements,
)
from .kernels import (
    AdimensionalPoint,
    KernelKind,
    NoiseKernel,
    QuadratureSpec,
    beta,
    beta_numeric,
    dbeta_dg,
    kernel_value,
)
from .metrology import (
    BracketingError,
    MetrologyPoint,
    OptimalPoint,
    QfiNumericResult,
    ScalingFit,
    fisher_information,
    metrology_point,
    optimal_time,
    qfi,
    qfi_numeric,
    qsnr,
    qsnr_ou_reference,
    scaling_fit,
)

__version__ = "0.1.0"
