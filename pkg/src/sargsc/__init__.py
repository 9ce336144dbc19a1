"""Statistical-complexity features for SAR intensity imagery.

Per-pixel texture analysis under the multiplicative speckle model:
fit a heavy-tailed intensity law in a sliding window, measure the
entropy of the fitted law and its Hellinger distance to the equal-mean
pure-speckle Gamma law, and map their product.  Includes raster and PPM
IO, a synthetic scene generator, and a CLI (see `sargsc --help`).
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from .distributions import (
    G0Params,
    GammaParams,
    HermitianCovariance,
    g0_log_density,
    gamma_limit_of_g0,
    gamma_log_density,
    numerical_cdf,
    sample_g0,
    sample_gamma,
    wishart_log_density,
)
from .errors import DataError, NumericalError, QuadratureError
from .estimation import FitResult, SolverConfig, fit_g0_mle, mle_residuals, sample_mean
from .features import (
    FeatureMaps,
    IntensityChannel,
    WindowSpec,
    extract_features,
    vector_gsc,
)
from .information import (
    InformationMeasures,
    complexity,
    hellinger_distance,
    hphi_divergence,
    pipeline_entropy,
    shannon_entropy,
)
from .specfun import (
    QuadratureConfig,
    QuadratureResult,
    digamma,
    integrate_half_line,
    ln_gamma,
    ln_multivariate_gamma,
)

__all__ = [
    "__version__",
    "backend_name",
    "DataError",
    "NumericalError",
    "QuadratureError",
    "QuadratureConfig",
    "QuadratureResult",
    "digamma",
    "ln_gamma",
    "ln_multivariate_gamma",
    "integrate_half_line",
    "GammaParams",
    "G0Params",
    "HermitianCovariance",
    "gamma_log_density",
    "g0_log_density",
    "wishart_log_density",
    "numerical_cdf",
    "sample_gamma",
    "sample_g0",
    "gamma_limit_of_g0",
    "SolverConfig",
    "FitResult",
    "sample_mean",
    "mle_residuals",
    "fit_g0_mle",
    "InformationMeasures",
    "shannon_entropy",
    "pipeline_entropy",
    "hellinger_distance",
    "hphi_divergence",
    "complexity",
    "IntensityChannel",
    "WindowSpec",
    "FeatureMaps",
    "extract_features",
    "vector_gsc",
]
