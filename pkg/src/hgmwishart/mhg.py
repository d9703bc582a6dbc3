"""Hypergeometric functions of a matrix argument, truncated by degree.

    pFq(a; b; X) = sum_k sum_{kappa |- k} prod(a_i)_kappa / prod(b_j)_kappa * C_kappa(X) / k!

Only the eigenvalues ``x`` of ``X`` enter.  The series is summed degree by
degree and stopped when the relative change of the partial sum drops below
``series_error``.  The same pass can carry the mixed first-order partials
``d_J pFq`` for every subset ``J`` of the coordinates; they are obtained by
differentiating the monomial expansions term by term, so they carry no
finite-difference error.

Subsets are encoded as bitmasks: coordinate ``k`` (1-based) is bit ``k-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .symfun import MonomialJets, Partition, zonal_table

__all__ = [
    "HyperParams",
    "SeriesResult",
    "pfq_truncated",
    "pfq_with_derivs",
    "hyp2f1",
    "kummer_transform_1",
    "kummer_transform_2",
    "transformed_value",
    "DEFAULT_SERIES_ERROR",
    "DEFAULT_MAX_DEGREE",
]

DEFAULT_SERIES_ERROR = 1e-5
DEFAULT_MAX_DEGREE = 200

_TINY = np.finfo(float).eps


@dataclass(frozen=True)
class HyperParams:
    numerator: tuple[float, ...]
    denominator: tuple[float, ...]

    def __init__(self, numerator: Sequence[float], denominator: Sequence[float]):
        object.__setattr__(self, "numerator", tuple(float(a) for a in numerator))
        object.__setattr__(self, "denominator", tuple(float(b) for b in denominator))

    def check_poles(self, m: int) -> None:
        """Raise :class:`ParameterError` if some ``(b_j)_kappa`` can vanish."""
        for b in self.denominator:
            for i in range(m):
                shifted = b - i / 2
                if shifted <= 0 and shifted == math.floor(shifted):
                    raise ParameterError(
                        f"denominator parameter {b} has a pole for row {i + 1} (m={m})")

    def termination_degree(self, m: int) -> int | None:
        """Degree beyond which every term vanishes, or ``None`` if the series is infinite."""
        bounds = [int(-a) * m for a in self.numerator if a <= 0 and a == math.floor(a)]
        return min(bounds) if bounds else None


@dataclass
class SeriesResult:
    value: float
    partial_sums_by_degree: list[float]
    truncation_degree: int
    converged: bool
    derivatives: np.ndarray | None = field(default=None, repr=False)


class _Coefficients:
    """``prod(a)_kappa / prod(b)_kappa / k!`` built cell by cell."""

    def __init__(self, params: HyperParams):
        self.a = params.numerator
        self.b = params.denominator
        self._memo: dict[Partition, float] = {(): 1.0}

    def __call__(self, kappa: Partition) -> float:
        hit = self._memo.get(kappa)
        if hit is not None:
            return hit
        r = len(kappa) - 1
        last = kappa[r]
        parent = kappa[:r] + ((last - 1,) if last > 1 else ())
        shift = last - 1 - r / 2
        factor = 1.0
        for a in self.a:
            factor *= a + shift
        for b in self.b:
            factor /= b + shift
        value = self(parent) * factor / sum(kappa)
        self._memo[kappa] = value
        return value


def _check_args(x, max_degree: int, series_error: float) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size == 0:
        raise ParameterError("x must be a non-empty vector of eigenvalues")
    if max_degree < 0:
        raise ParameterError("max_degree must be non-negative")
    if not series_error > 0:
        raise ParameterError("series_error must be positive")
    return x


def _sum_series(params: HyperParams, x, max_degree: int, series_error: float,
                derivs: bool) -> SeriesResult:
    x = _check_args(x, max_degree, series_error)
    m = len(x)
    params.check_poles(m)
    coef = _Coefficients(params)
    jets = MonomialJets(x, derivs)
    finite = params.termination_degree(m)

    total = np.zeros((1 << m) if derivs else 1)
    total[0] = 1.0
    sums = [1.0]
    converged = False
    degree = 0
    last_degree = max_degree if finite is None else min(max_degree, finite)
    for k in range(1, last_degree + 1):
        parts, table = zonal_table(k, m)
        weights = np.array([coef(p) for p in parts]) @ table
        mono = jets.matrix(parts)
        term = np.zeros_like(total)
        for r in range(len(parts)):
            if weights[r] != 0.0:
                term += weights[r] * mono[r]
        prev = total[0]
        total = total + term
        sums.append(float(total[0]))
        degree = k
        if finite is None and abs(total[0] - prev) < series_error * max(abs(prev), _TINY):
            converged = True
            break
    if finite is not None and finite <= max_degree:
        converged = True
    return SeriesResult(float(total[0]), sums, degree, converged,
                        total if derivs else None)


def pfq_truncated(params: HyperParams, x, max_degree: int = DEFAULT_MAX_DEGREE,
                  series_error: float = DEFAULT_SERIES_ERROR) -> SeriesResult:
    """Truncated ``pFq`` at the eigenvalues ``x``.

    The sum stops at the first degree ``K`` where
    ``|f_K - f_{K-1}| < series_error * |f_{K-1}|``.  If the parameters make
    the series terminate (a numerator equal to ``0, -1, -2, ...``), all
    nonzero terms are summed exactly.  When ``max_degree`` is reached first,
    ``converged`` is False.
    """
    return _sum_series(params, x, max_degree, series_error, derivs=False)


def pfq_with_derivs(params: HyperParams, x, max_degree: int = DEFAULT_MAX_DEGREE,
                    series_error: float = DEFAULT_SERIES_ERROR,
                    full_output: bool = False):
    """Truncated ``pFq`` and all its mixed first-order partials.

    Returns a vector of length ``2**m``; entry ``bits`` is ``d_J pFq`` for
    the subset ``J`` encoded by ``bits`` (entry 0 is the value itself).
    All entries are truncated at the degree chosen for the value.  With
    ``full_output=True`` the :class:`SeriesResult` is returned as well.
    """
    res = _sum_series(params, x, max_degree, series_error, derivs=True)
    if full_output:
        return res.derivatives, res
    return res.derivatives


def hyp2f1(a: float, b: float, c: float, x, **kwargs) -> SeriesResult:
    """Shorthand for ``pfq_truncated(HyperParams([a, b], [c]), x)``."""
    return pfq_truncated(HyperParams([a, b], [c]), x, **kwargs)


def _below_one(x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x >= 1):
        raise DomainError("Kummer relations need every eigenvalue below 1")
    return x


def kummer_transform_1(a: float, b: float, c: float, x):
    """``2F1(a,b;c;X) = |I-X|^(c-a-b) 2F1(c-a, c-b; c; X)`` (Euler's relation).

    Returns ``(params, x, exponent)`` for the right-hand side.
    """
    x = _below_one(x)
    return HyperParams([c - a, c - b], [c]), x, c - a - b


def kummer_transform_2(a: float, b: float, c: float, x):
    """``2F1(a,b;c;X) = |I-X|^(-b) 2F1(c-a, b; c; -X(I-X)^-1)``.

    Returns ``(params, y, exponent)`` with ``y_i = -x_i / (1 - x_i)``.
    """
    x = _below_one(x)
    return HyperParams([c - a, b], [c]), -x / (1.0 - x), -b


def transformed_value(params: HyperParams, y, exponent: float, x, **kwargs) -> float:
    """Evaluate ``|I - X|^exponent * pFq(params; y)`` as returned by a transform."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    logdet = float(np.sum(np.log1p(-x)))
    return math.exp(exponent * logdet) * pfq_truncated(params, y, **kwargs).value
