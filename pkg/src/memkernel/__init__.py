"""Memory-kernel estimation for generalized Langevin dynamics.

The workflow runs from trajectories to a kernel estimate:

1. :func:`ensemble_corr` turns observed velocity paths into lagged
   correlation samples;
2. :func:`prony_fit` interpolates them by stable exponential sums;
3. :func:`estimate_kernel` regresses a cubic-spline kernel under the
   weighted Sobolev loss, and :func:`theta_L` gives the closed-form
   inverse-Laplace estimate;
4. :func:`coercivity_bounds`, :func:`l2_rho_norm` and :func:`error_bound`
   quantify the result.

:func:`run_pipeline` and :class:`MemoryKernelEstimator` chain the steps;
:mod:`memkernel.gle_sim` generates synthetic data and
:mod:`memkernel.experiments` holds reproducible scenarios.
"""

from .analysis import (
    CoercivityReport,
    coercivity_bounds,
    error_bound,
    h1_alpha_norm,
    l2_rho_norm,
    laplace_multiplier,
    spectral_function,
)
from .correlation import (
    CorrelationEstimate,
    ensemble_corr,
    read_correlation_csv,
    temporal_acf,
    temporal_force_corr,
    write_correlation_csv,
)
from .exceptions import (
    AccuracyError,
    CoercivityError,
    ConstraintError,
    ConstraintViolationError,
    DegenerateInputError,
    DivergenceError,
    IllConditionedError,
    InstabilityError,
    InvalidKernelError,
    MemKernelError,
    NumericalError,
    PoleError,
    ValidationError,
)
from .gle_sim import (
    DriftSpec,
    ForceSpec,
    KernelSpec,
    NoiseConfig,
    ObservationConfig,
    SimConfig,
    TrajectoryEnsemble,
    observe,
    simulate_ensemble,
    simulate_noise,
    simulate_trajectory,
    spectral_density,
)
from .laplace_domain import DeltaKernel, kernel_to_acf, laplace_eval, partial_fractions, rational_quotient, theta_L
from .pipeline import MemoryKernelEstimator, PipelineResult, evaluate, fit_correlations, run_pipeline
from .prony import PronyConfig, RegularizedProny, prony_fit
from .prony_series import PronySeries
from .sobolev import (
    KernelEstimate,
    SobolevKernelRegressor,
    SplineBasis,
    WeightedSpace,
    alpha_from_h,
    estimate_kernel,
    sobolev_loss,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CoercivityError",
    "CoercivityReport",
    "ConstraintError",
    "ConstraintViolationError",
    "CorrelationEstimate",
    "DegenerateInputError",
    "DeltaKernel",
    "DivergenceError",
    "DriftSpec",
    "ForceSpec",
    "IllConditionedError",
    "InstabilityError",
    "InvalidKernelError",
    "KernelEstimate",
    "KernelSpec",
    "MemKernelError",
    "MemoryKernelEstimator",
    "NoiseConfig",
    "NumericalError",
    "ObservationConfig",
    "PipelineResult",
    "PoleError",
    "PronyConfig",
    "PronySeries",
    "RegularizedProny",
    "SimConfig",
    "SobolevKernelRegressor",
    "SplineBasis",
    "TrajectoryEnsemble",
    "ValidationError",
    "WeightedSpace",
    "alpha_from_h",
    "coercivity_bounds",
    "ensemble_corr",
    "error_bound",
    "estimate_kernel",
    "evaluate",
    "fit_correlations",
    "h1_alpha_norm",
    "kernel_to_acf",
    "l2_rho_norm",
    "laplace_eval",
    "laplace_multiplier",
    "observe",
    "partial_fractions",
    "prony_fit",
    "rational_quotient",
    "read_correlation_csv",
    "run_pipeline",
    "simulate_ensemble",
    "simulate_noise",
    "simulate_trajectory",
    "sobolev_loss",
    "spectral_density",
    "spectral_function",
    "temporal_acf",
    "temporal_force_corr",
    "theta_L",
    "write_correlation_csv",
]
