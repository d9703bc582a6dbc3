"""Log-space gamma helpers."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import betainc, gammaln

from .errors import DomainError

__all__ = ["log_multigamma", "log_beta_cdf_bound"]


def log_multigamma(m: int, a: float) -> float:
    """``log Gamma_m(a) = m(m-1)/4 log(pi) + sum_{i=1..m} log Gamma(a - (i-1)/2)``.

    ``m = 0`` gives 0 (empty product).
    """
    if m < 0:
        raise DomainError("dimension must be non-negative")
    if m == 0:
        return 0.0
    if not a > (m - 1) / 2:
        raise DomainError(f"multivariate gamma needs a > (m-1)/2, got a={a}, m={m}")
    shifts = a - 0.5 * np.arange(m)
    return m * (m - 1) / 4 * math.log(math.pi) + float(np.sum(gammaln(shifts)))


def log_beta_cdf_bound(x: float, beta, n1: float, n2: float) -> float:
    """Log of an upper bound on ``Pr(l_1 <= x)``.

    ``l_1`` is at least the Rayleigh quotient ``W1_ii / W2_ii``, which is
    ``beta_i F``-type distributed, so ``Pr(l_1 <= x) <= I_{x/(x+beta_i)}(n1/2, n2/2)``
    for every ``i``.  Returns ``-inf`` when the bound underflows.
    """
    beta = np.asarray(beta, dtype=float)
    vals = betainc(n1 / 2, n2 / 2, x / (x + beta))
    low = float(np.min(vals))
    return math.log(low) if low > 0 else -math.inf
