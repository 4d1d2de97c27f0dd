"""Spline kernels on the ball, their random-feature expansions and leverage scores."""

from .kernels import (
    Derivative1DProfile,
    GramMatrix,
    KernelSpec,
    UnsupportedOrderError,
    arccos_kernel,
    c_alpha,
    distance_kernel_matrix,
    gram,
    k1_pol,
    kd,
    kd_pol,
    kernel_matrix,
    make_profile,
    rkhs_norm_1d,
    spline_fourier_constant,
)
from .features import (
    FeatureEnsemble,
    FeatureMatrix,
    approx_kernel,
    features,
    fourier_features,
    nn_features,
    sample_fourier_ensemble,
    sample_nn_ensemble,
)
from .leverage import (
    GridLeverageEstimator,
    LeverageProfile,
    empirical_leverage,
    fourier_leverage,
    fourier_profiles,
    nn_leverage,
    nn_profile,
    oracle_leverage,
    solve_regularized_operator,
)
from .regression import (
    DegenerateDesignError,
    FitConfig,
    IllConditionedError,
    RegressionModel,
    fit_constrained_spline,
    fit_dual,
    fit_primal,
    monomial_exponents,
    monomial_matrix,
    predict,
)
from .sampling import (
    FourierFrequencies,
    NNParams,
    RngStream,
    SamplerError,
    SphereSample,
    derive_seed,
    sample_fourier_frequencies,
    sample_fourier_tau,
    sample_fourier_taus,
    sample_nn_params,
    sample_sphere,
    sphere_moment,
    tau_density,
    tau_rejection_stats,
)

__version__ = "0.1.0"
