"""Weighted periodogram sums of stationary linear processes.

Exact finite-sample identities, Bartlett-approximation residuals, Monte
Carlo verification of the normal limits, and local Whittle estimation of
the memory parameter.
"""

from .errors import (DegeneratePeriodogram, DegenerateWeights, DomainError,
                     InsufficientSamples, MissingInnovations, NoConvergence,
                     NonCausalAR, ParseError, ValidationError)
from .models import (CENTERED_EXPONENTIAL, GAUSSIAN, RADEMACHER, UNIFORM,
                     InnovationFamily, InnovationSpec, LinearProcessModel,
                     ModelKind, SamplePath, arfima_ma_coeffs,
                     default_truncation, innovation_by_name,
                     sample_innovations, short_memory_g, simulate,
                     spectral_density, transfer_function)
from .spectral import (DftVector, FourierGrid, Periodogram, dft,
                       exact_dft_cross_cov, exact_dft_second_moment,
                       fourier_grid, nu_for, periodogram)
from .quadforms import (QuadFormReport, ToeplitzForm, WeightConstants,
                        WeightKind, WeightScheme, bartlett_residual,
                        counterexample_ratio_sq_limit, frobenius_norm_sq,
                        generate_weights, lindeberg_ratios, q_n_x, q_n_zeta,
                        quad_form_report, s_n_x, s_n_zeta, spectral_norm,
                        toeplitz_form, toeplitz_matvec, toeplitz_quadratic,
                        weight_constants)
from .mc import (BoundRow, DecayRow, MCStudyConfig, MCStudySummary,
                 PerNSummary, Statistic, kolmogorov_sf, normality_tests,
                 run_bartlett_bound_study, run_clt_study,
                 run_counterexample_study, run_dft_bias_decay_study,
                 run_variance_identity_check)
from .whittle import WhittleResult, estimate_d, lw_objective, lw_weights
from .config import ExperimentConfig, parse_config, serialize_config

__version__ = "0.1.0"
