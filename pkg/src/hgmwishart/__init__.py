"""Distribution of the largest root of W1 W2^-1 by the holonomic gradient method.

The largest root of ``W1 W2^-1`` for independent ``W1 ~ W_m(n1, Sigma1)`` and
``W2 ~ W_m(n2, Sigma2)`` has a CDF given by a Gauss hypergeometric function
of a matrix argument.  This package evaluates it by a zonal-polynomial series
near zero followed by numerical integration of its Pfaffian system, and
ships independent checks: null-case closed forms, Khatri's density and a
Monte Carlo oracle.
"""

from .dist import (l1_density_khatri, max_root_cdf, min_root_upper, null_constantine,
                   null_venables, ratio_cdf_series, ratio_density)
from .errors import (ConvergenceWarning, DiagonalSingularityError, DomainError, HgmError,
                     InitializationError, IntegrationError, ParameterError, SingularityError,
                     ToleranceWarning)
from .hgm import CdfCurve, HgmState, IntegratorConfig, ProblemSpec, initial_vector, integrate_cdf
from .mhg import HyperParams, hyp2f1, pfq_truncated, pfq_with_derivs
from .oracle import McEstimate, empirical_max_root_cdf, sample_wishart
from .special import log_multigamma

__version__ = "0.1.0"

__all__ = [
    "CdfCurve", "ConvergenceWarning", "DiagonalSingularityError", "DomainError", "HgmError",
    "HgmState", "HyperParams", "InitializationError", "IntegrationError", "IntegratorConfig",
    "McEstimate", "ParameterError", "ProblemSpec", "SingularityError", "ToleranceWarning",
    "empirical_max_root_cdf", "hyp2f1", "initial_vector", "integrate_cdf", "l1_density_khatri",
    "log_multigamma", "max_root_cdf", "min_root_upper", "null_constantine", "null_venables",
    "pfq_truncated", "pfq_with_derivs", "ratio_cdf_series", "ratio_density", "sample_wishart",
]
