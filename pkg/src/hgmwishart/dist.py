"""Distribution-level formulas for the roots of W1 W2^-1.

Every normalizing constant is assembled from :func:`log_multigamma` in log
space.  Eigenvalue conventions: ``spec.beta`` are the eigenvalues of
``Sigma2^-1 Sigma1``; ``Sigma1 Sigma2^-1`` is similar to it, so the same
numbers serve as the eigenvalues of ``Lambda`` in Khatri's density.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import linalg

from .errors import ConvergenceWarning, DomainError, ParameterError
from .hgm import IntegratorConfig, ProblemSpec, initial_vector, integrate_cdf, series_probability
from .mhg import HyperParams, pfq_truncated
from .special import log_multigamma
from .symfun import enumerate_partitions, gen_pochhammer, zonal_expansion

__all__ = [
    "FlaggedValue",
    "log_multigamma",
    "ratio_density",
    "ratio_cdf_series",
    "max_root_cdf",
    "min_root_upper",
    "null_constantine",
    "null_venables",
    "venables_coefficients",
    "l1_density_khatri",
]

# below this largest argument the plain series is cheaper than the HGM
AUTO_SERIES_LIMIT = 0.5


@dataclass(frozen=True)
class FlaggedValue:
    """A series-based value together with its convergence status."""

    value: float
    converged: bool
    truncation_degree: int

    def __float__(self) -> float:
        return self.value


def _as_spd(a, name: str) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] != a.shape[1]:
        raise ParameterError(f"{name} must be square")
    # only the lower triangle is trusted
    low = np.tril(a)
    return low + np.tril(a, -1).T


def _flag(res, what: str) -> None:
    if not res.converged:
        warnings.warn(f"{what}: series not converged by degree {res.truncation_degree}",
                      ConvergenceWarning, stacklevel=3)


def ratio_density(U, Sigma2, n1: float, n2: float) -> float:
    """Density of ``U = W2^-1/2 W1 W2^-1/2`` at ``U`` when ``Sigma1 = I``.

    ``Gamma_m((n1+n2)/2) |Sigma2|^(n1/2) / (Gamma_m(n1/2) Gamma_m(n2/2))
    * |I + Sigma2 U|^(-(n1+n2)/2) |U|^((n1-m-1)/2)``.
    """
    U = _as_spd(U, "U")
    S = _as_spd(Sigma2, "Sigma2")
    m = U.shape[0]
    if S.shape != U.shape:
        raise ParameterError("U and Sigma2 must have the same shape")
    if n1 <= m - 1 or n2 <= m - 1:
        raise ParameterError("need n1, n2 > m - 1")
    eig_s = linalg.eigvalsh(S)
    if np.min(eig_s) <= 0:
        raise ParameterError("Sigma2 must be positive definite")
    eig_u = linalg.eigvalsh(U)
    if np.min(eig_u) < -1e-12 * max(1.0, np.max(np.abs(eig_u))):
        raise DomainError("U must be positive semidefinite")
    power = (n1 - m - 1) / 2
    if np.min(eig_u) <= 0:
        if power > 0:
            return 0.0
        if power < 0:
            raise DomainError("density is unbounded at singular U for n1 < m + 1")
        log_det_u = 0.0
    else:
        log_det_u = float(np.sum(np.log(eig_u)))
    sign, log_det_iu = np.linalg.slogdet(np.eye(m) + S @ U)
    log_c = (log_multigamma(m, (n1 + n2) / 2) - log_multigamma(m, n1 / 2)
             - log_multigamma(m, n2 / 2) + n1 / 2 * float(np.sum(np.log(eig_s))))
    return math.exp(log_c - (n1 + n2) / 2 * log_det_iu + power * log_det_u)


def ratio_cdf_series(Omega, Sigma2, n1: float, n2: float, max_degree: int = 200,
                     series_error: float = 1e-10) -> FlaggedValue:
    """``P(U <= Omega)`` from the alternating series in ``-Sigma2 Omega``.

    Slow and only reliable while the eigenvalues of ``Sigma2 Omega`` are well
    below 1; it is meant as an independent small-argument check.  The
    eigenvalues come from the symmetric form ``Omega^1/2 Sigma2 Omega^1/2``.
    """
    O = _as_spd(Omega, "Omega")
    S = _as_spd(Sigma2, "Sigma2")
    m = O.shape[0]
    half = linalg.sqrtm(O).real
    z = linalg.eigvalsh(half @ S @ half)
    if np.min(z) <= 0:
        if np.min(z) > -1e-14:
            return FlaggedValue(0.0, True, 0)
        raise ParameterError("Omega must be positive definite")
    res = pfq_truncated(HyperParams([n1 / 2, (n1 + n2) / 2], [(n1 + m + 1) / 2]), -z,
                        max_degree, series_error)
    _flag(res, "ratio_cdf_series")
    log_c = (log_multigamma(m, (m + 1) / 2) + log_multigamma(m, (n1 + n2) / 2)
             - log_multigamma(m, (n1 + m + 1) / 2) - log_multigamma(m, n2 / 2))
    value = math.exp(log_c + n1 / 2 * float(np.sum(np.log(z)))) * res.value
    return FlaggedValue(value, res.converged, res.truncation_degree)


def _series_point(spec: ProblemSpec, x: float, cfg: IntegratorConfig) -> float:
    p, res = series_probability(spec, x, cfg.max_degree, cfg.series_error)
    _flag(res, "max_root_cdf")
    return p


def max_root_cdf(spec: ProblemSpec, x, method: str = "auto",
                 cfg: IntegratorConfig | None = None):
    """``Pr(l_1(W1 W2^-1) <= x)`` for a scalar or an array of ``x``.

    ``method="series"`` sums the non-negative series directly (ties in
    ``beta`` are fine); ``"hgm"`` integrates the Pfaffian system and raises
    :class:`DiagonalSingularityError` on tied ``beta``; ``"auto"`` takes the
    series for tied ``beta`` or small arguments and the HGM otherwise.  When
    all ``beta`` are equal to some ``b``, ``"auto"`` uses the null-case
    formula at ``x / b`` instead.
    """
    if method not in ("auto", "series", "hgm"):
        raise ParameterError(f"unknown method {method!r}")
    cfg = cfg or IntegratorConfig()
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    flat = np.atleast_1d(xs).ravel()
    if np.any(~(flat > 0)):
        raise DomainError("x must be positive")
    out = np.empty(flat.size)
    if method == "auto":
        beta = np.asarray(spec.beta)
        if np.ptp(beta) <= cfg.gap * np.max(beta):
            b = float(np.mean(beta))
            for i, v in enumerate(flat):
                out[i] = null_constantine(spec.m, spec.n1, spec.n2, float(v) / b,
                                          max(cfg.max_degree, 400), min(cfg.series_error, 1e-14))
            out = np.clip(out, 0.0, 1.0)
            return float(out[0]) if scalar else out.reshape(xs.shape)
        if spec.has_ties(cfg.gap):
            method = "series"
        else:
            worst = float(np.max(spec.argument(float(np.max(flat)))))
            method = "series" if worst <= AUTO_SERIES_LIMIT else "hgm"
    if method == "series":
        for i, v in enumerate(flat):
            out[i] = _series_point(spec, float(v), cfg)
    else:
        x0, state = initial_vector(spec, cfg)
        order = np.argsort(flat, kind="stable")
        below = [i for i in order if flat[i] <= x0]
        above = [i for i in order if flat[i] > x0]
        for i in below:
            out[i] = _series_point(spec, float(flat[i]), cfg)
        if above:
            curve = integrate_cdf(spec, cfg, flat[above], state=state)
            out[above] = curve.prob
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out.reshape(xs.shape)


def min_root_upper(spec: ProblemSpec, x, method: str = "auto",
                   cfg: IntegratorConfig | None = None):
    """``Pr(l_m(W1 W2^-1) >= x)``: the largest-root CDF of the swapped problem at ``1/x``."""
    xs = np.asarray(x, dtype=float)
    if np.any(~(xs > 0)):
        raise DomainError("x must be positive")
    return max_root_cdf(spec.swapped(), 1.0 / xs, method, cfg)


def _null_log_constant(m: int, n1: float, n2: float) -> float:
    return (log_multigamma(m, (n1 + n2) / 2) + log_multigamma(m, (m + 1) / 2)
            - log_multigamma(m, n2 / 2) - log_multigamma(m, (n1 + m + 1) / 2))


def _monomial_count(lam: Sequence[int], m: int) -> int:
    """``m_lambda(1, ..., 1)`` in ``m`` variables: the number of distinct arrangements."""
    if len(lam) > m:
        return 0
    count = math.factorial(m) // math.factorial(m - len(lam))
    for part in set(lam):
        count //= math.factorial(lam.count(part))
    return count


def _tied_coefficients(numerator: Sequence[Fraction], denominator: Sequence[Fraction], m: int,
                       k_max: int, max_part: int | None = None) -> list[Fraction]:
    """Exact ``c_k = (1/k!) sum_kappa prod(a)_kappa / prod(b)_kappa C_kappa(I_m)``, ``k = 0..k_max``.

    A pFq at the scalar matrix ``y I_m`` is ``sum_k c_k y^k``.
    """
    coeffs = []
    for k in range(k_max + 1):
        total = Fraction(0)
        for kappa in enumerate_partitions(k, m, max_part):
            w = Fraction(1)
            for a in numerator:
                w *= gen_pochhammer(a, kappa)
            if w == 0:
                continue
            for b in denominator:
                w /= gen_pochhammer(b, kappa)
            exp = zonal_expansion(kappa, m)
            total += w * sum(c * _monomial_count(lam, m) for lam, c in exp.coefficients.items())
        coeffs.append(total / math.factorial(k))
    return coeffs


# exact rational evaluation of a finite null-case series up to this degree
EXACT_DEGREE_LIMIT = 60
_CONSTANTINE_CACHE: dict[tuple[int, Fraction, Fraction], list[Fraction]] = {}


def null_constantine(m: int, n1: float, n2: float, x: float, max_degree: int = 400,
                     series_error: float = 1e-14) -> float:
    """Null-case ``Pr(l_1 <= x)`` (``Sigma1 = Sigma2``) from the beta-matrix CDF.

    ``K (x/(1+x))^(n1 m/2) 2F1(n1/2, (m+1-n2)/2; (n1+m+1)/2; x/(1+x) I_m)``.
    When ``(n2-m-1)/2`` is a non-negative integer the series is a polynomial
    in ``x/(1+x)``; its signs alternate, so up to degree
    ``EXACT_DEGREE_LIMIT`` it is evaluated in exact rational arithmetic.
    """
    if x < 0:
        raise DomainError("x must be non-negative")
    if n1 < m or n2 < m:
        raise ParameterError("need n1, n2 >= m")
    if x == 0:
        return 0.0
    y = x / (1 + x)
    params = HyperParams([n1 / 2, (m + 1 - n2) / 2], [(n1 + m + 1) / 2])
    finite = params.termination_degree(m)
    log_front = _null_log_constant(m, n1, n2) + n1 * m / 2 * math.log(y)
    if finite is not None and finite <= EXACT_DEGREE_LIMIT:
        key = (m, Fraction(n1), Fraction(n2))
        coeffs = _CONSTANTINE_CACHE.get(key)
        if coeffs is None:
            coeffs = _tied_coefficients([Fraction(n1) / 2, (m + 1 - Fraction(n2)) / 2],
                                        [(Fraction(n1) + m + 1) / 2], m, finite)
            _CONSTANTINE_CACHE[key] = coeffs
        fy = Fraction(y)
        value = Fraction(0)
        for c in reversed(coeffs):
            value = value * fy + c
        return math.exp(log_front) * float(value)
    res = pfq_truncated(params, np.full(m, y), max_degree, series_error)
    _flag(res, "null_constantine")
    return math.exp(log_front) * res.value


_VENABLES_CACHE: dict[tuple[int, Fraction, int], list[Fraction]] = {}


def _venables_r(m: int, n2) -> int:
    r2 = Fraction(n2) - m - 1
    if r2 < 0 or r2.denominator != 1 or r2.numerator % 2:
        raise ParameterError(f"(n2 - m - 1)/2 = {float(r2) / 2:g} is not a non-negative integer")
    return r2.numerator // 2


def venables_coefficients(m: int, n1, n2) -> list[Fraction]:
    """Exact ``(1/k!) sum_{kappa |- k, kappa_1 <= r} (n1/2)_kappa C_kappa(I_m)`` for ``k = 0..r m``."""
    r = _venables_r(m, n2)
    key = (m, Fraction(n1), r)
    hit = _VENABLES_CACHE.get(key)
    if hit is None:
        hit = _tied_coefficients([Fraction(n1) / 2], [], m, r * m, r)
        _VENABLES_CACHE[key] = hit
    return list(hit)


def null_venables(m: int, n1, n2, x: float) -> float:
    """Null-case ``Pr(l_1 <= x)`` as a finite sum, valid when ``r = (n2-m-1)/2`` is a non-negative integer.

    ``(x/(1+x))^(n1 m/2) sum_{k=0}^{r m} c_k (1+x)^(-k)``.
    """
    if x < 0:
        raise DomainError("x must be non-negative")
    coeffs = venables_coefficients(m, n1, n2)
    if x == 0:
        return 0.0
    w = 1.0 / (1.0 + x)
    poly = 0.0
    for c in reversed(coeffs):
        poly = poly * w + float(c)
    return math.exp(float(n1) * m / 2 * math.log(x * w)) * poly


def l1_density_khatri(spec: ProblemSpec, x: float, max_degree: int = 400,
                      series_error: float = 1e-12) -> FlaggedValue:
    """Density of the largest root at ``x`` through a 3F2 series.

    With ``beta`` the eigenvalues of ``Lambda = Sigma1 Sigma2^-1`` and
    ``y_i = x / (beta_i + x)``:

        f(x) = c2 prod beta_i^(-n1/2) x^(m n1/2 - 1) prod (1 + x/beta_i)^(-(n1+n2)/2)
               * 3F2((n1+n2)/2, m/2 + 1, (m-1)/2; m/2, (n1+m+1)/2; y).
    """
    if not x > 0:
        raise DomainError("x must be positive")
    m, n1, n2 = spec.m, spec.n1, spec.n2
    beta = np.asarray(spec.beta)
    res = pfq_truncated(HyperParams([(n1 + n2) / 2, m / 2 + 1, (m - 1) / 2],
                                    [m / 2, (n1 + m + 1) / 2]),
                        spec.argument(x), max_degree, series_error)
    _flag(res, "l1_density_khatri")
    log_c2 = (math.lgamma(0.5) + log_multigamma(m, (n1 + n2) / 2) + log_multigamma(m - 1, m / 2 + 1)
              - math.lgamma(m / 2) - math.lgamma(n1 / 2) - log_multigamma(m, n2 / 2)
              - log_multigamma(m - 1, (n1 + m + 1) / 2))
    log_f = (log_c2 - n1 / 2 * float(np.sum(np.log(beta))) + (m * n1 / 2 - 1) * math.log(x)
             - (n1 + n2) / 2 * float(np.sum(np.log1p(x / beta))))
    return FlaggedValue(math.exp(log_f) * res.value, res.converged, res.truncation_degree)
