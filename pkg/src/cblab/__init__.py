"""Two-group mean-field spin model at the uniqueness boundary.

Exact finite-size distributions, spectral splitting of the free-energy
landscape, the non-Gaussian limit law for the flat direction, and Glauber
dynamics for Monte Carlo cross-checks.
"""

__version__ = "0.1.0"

from .errors import (BudgetExceeded, CblabError, DegenerateError,
                     DegenerateHessian, DomainError, GridTooCoarse,
                     HypothesisViolation, NoCriticalPoint,
                     NonPositiveCoefficient, NotCritical, ResourceBudget)
from .exact import (MagnetizationPmf, SystemSize, WeightedPoints, exact_pmf,
                    marginal_ks, pressure, rescaled_transformed_pmf, summarize,
                    transformed_pushforward)
from .limitlaw import (QUARTIC_KURTOSIS, LimitLaw, LimitMoments, density,
                       gaussian_half_width, marginal_cdf_x1, marginal_cdf_x2,
                       marginal_density_x1, marginal_density_x2, moments,
                       quartic_half_width)
from .model import (CriticalityReport, CurvePoint, ModelParams,
                    check_critical_conditions, count_mean_field_solutions,
                    inverted_curves, mean_field_residual, pressure_functional,
                    solve_critical_j12)
from .sampler import (ChainConfig, SampleBatch, empirical_pmf, glauber_step,
                      run_chains, sample_direct, split_seed, step_stream)
from .spectral import (SpectralData, TildeCoefficients, TransformedModel,
                       eigen_decompose, eigenvalues_at_origin,
                       excluded_neighborhood_integral, hessian_at_origin,
                       integrate_transformed_gibbs, limit_coefficients,
                       linear_envelope, spectral_data, tilde_coefficients,
                       transform_magnetization, transform_matrix,
                       transformed_functional)

__all__ = [
    "__version__",
    "BudgetExceeded", "CblabError", "DegenerateError", "DegenerateHessian",
    "DomainError", "GridTooCoarse", "HypothesisViolation", "NoCriticalPoint",
    "NonPositiveCoefficient", "NotCritical", "ResourceBudget",
    "MagnetizationPmf", "SystemSize", "WeightedPoints", "exact_pmf",
    "marginal_ks", "pressure", "rescaled_transformed_pmf", "summarize",
    "transformed_pushforward",
    "QUARTIC_KURTOSIS", "LimitLaw", "LimitMoments", "density",
    "gaussian_half_width", "marginal_cdf_x1", "marginal_cdf_x2",
    "marginal_density_x1", "marginal_density_x2", "moments",
    "quartic_half_width",
    "CriticalityReport", "CurvePoint", "ModelParams",
    "check_critical_conditions", "count_mean_field_solutions",
    "inverted_curves", "mean_field_residual", "pressure_functional",
    "solve_critical_j12",
    "ChainConfig", "SampleBatch", "empirical_pmf", "glauber_step",
    "run_chains", "sample_direct", "split_seed", "step_stream",
    "SpectralData", "TildeCoefficients", "TransformedModel",
    "eigen_decompose", "eigenvalues_at_origin",
    "excluded_neighborhood_integral", "hessian_at_origin",
    "integrate_transformed_gibbs", "limit_coefficients", "linear_envelope",
    "spectral_data", "tilde_coefficients", "transform_magnetization",
    "transform_matrix", "transformed_functional",
]
