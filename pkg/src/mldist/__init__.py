"""Mittag-Leffler distribution, positive stable laws and the pathway family."""

__version__ = "0.1.0"

from .errors import (CancellationError, DomainError, MLDistError, NumericalError,
                     QuadratureError, SeriesNonConvergence, StatisticalTestFailure)
from .series import EvalResult, SeriesPolicy, pochhammer, recip_gamma
from .ml_core import MLParams, ml_cdf, ml_laplace, ml_mellin, ml_pdf
from .stable_levy import StableParams, levy_cdf, levy_laplace, levy_mellin, levy_pdf, levy_sample
from .sampling import (SampleBatch, gamma_power_mellin, gamma_sample, make_stream, ml_sample,
                       ml_sample_via_stable_mean, sample_batch)
from .pathway import (PathwayParams, PrabhakarParams, fstar_scaled, pathway_limit_gap, pathway_norm_const,
                      pathway_pdf, pathway_regime, prabhakar_fstar, stirling_ratio,
                      tsallis_ode_residual)
from .verify import (TransformProbe, clt_convergence_report, empirical_laplace, ks_statistic,
                     levy_limit_report, transform_oracle)

__all__ = [
    "CancellationError", "DomainError", "MLDistError", "NumericalError", "QuadratureError",
    "SeriesNonConvergence", "StatisticalTestFailure",
    "EvalResult", "SeriesPolicy", "pochhammer", "recip_gamma",
    "MLParams", "ml_cdf", "ml_laplace", "ml_mellin", "ml_pdf",
    "StableParams", "levy_cdf", "levy_laplace", "levy_mellin", "levy_pdf", "levy_sample",
    "SampleBatch", "gamma_power_mellin", "gamma_sample", "make_stream", "ml_sample",
    "ml_sample_via_stable_mean", "sample_batch",
    "PathwayParams", "PrabhakarParams", "fstar_scaled", "pathway_limit_gap", "pathway_norm_const", "pathway_pdf",
    "pathway_regime", "prabhakar_fstar", "stirling_ratio", "tsallis_ode_residual",
    "TransformProbe", "clt_convergence_report", "empirical_laplace", "ks_statistic",
    "levy_limit_report", "transform_oracle",
]
