"""Holonomic gradient method for the largest root of W1 W2^-1.

With ``beta`` the eigenvalues of ``Sigma2^-1 Sigma1`` and
``y_i(x) = x / (beta_i + x)``,

    Pr(l_1 < x) = K x^(n1 m/2) prod beta_i^(n2/2) prod (beta_i + x)^(-(n1+n2)/2)
                  * 2F1((m+1)/2, (n1+n2)/2; (n1+m+1)/2; y(x))

where ``K = Gamma_m((n1+n2)/2) Gamma_m((m+1)/2) / (Gamma_m(n2/2) Gamma_m((n1+m+1)/2))``.
This 2F1 has a series of non-negative terms.  Step one evaluates it and its
mixed partials by the series at a small ``x0``; step two integrates

    dF/dx = sum_i beta_i / (beta_i + x)^2 * P_i(y(x)) F

with an adaptive Dormand-Prince 5(4) pair.  ``F`` itself grows like
``(1 + x)^((n1+n2)/2)``, which would force tiny steps, so the integrated
vector is ``G = prefactor(x) F`` (the probability and its scaled partials):

    dG/dx = (d log prefactor/dx + sum_i ...) G.

``abs_err`` is therefore an error on the probability scale.  The prefactor
only ever appears in log space, and ``G`` carries a running log scale so it
can neither underflow nor overflow.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (DiagonalSingularityError, DomainError, InitializationError,
                     IntegrationError, ParameterError, ToleranceWarning)
from .mhg import DEFAULT_MAX_DEGREE, DEFAULT_SERIES_ERROR, HyperParams, SeriesResult, pfq_truncated, pfq_with_derivs
from .pfaffian import DEFAULT_GAP, pfaffian_apply, pfaffian_matrices
from .special import log_beta_cdf_bound, log_multigamma

__all__ = [
    "ProblemSpec",
    "IntegratorConfig",
    "HgmState",
    "CdfCurve",
    "ToleranceWarning",
    "log_prefactor",
    "series_probability",
    "initial_vector",
    "integrate_cdf",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemSpec:
    """Two-sample Wishart problem: ``W1 ~ W_m(n1, Sigma1)``, ``W2 ~ W_m(n2, Sigma2)``.

    ``beta`` holds the eigenvalues of ``Sigma2^-1 Sigma1``.
    """

    m: int
    n1: float
    n2: float
    beta: tuple[float, ...]

    def __post_init__(self):
        beta = tuple(float(v) for v in np.atleast_1d(self.beta))
        object.__setattr__(self, "beta", beta)
        if self.m < 1:
            raise ParameterError("m must be a positive integer")
        if len(beta) != self.m:
            raise ParameterError(f"beta has {len(beta)} entries, expected m={self.m}")
        if self.n1 < self.m or self.n2 < self.m:
            raise ParameterError("degrees of freedom must satisfy n1, n2 >= m")
        if any(not v > 0 for v in beta):
            raise ParameterError("beta entries must be positive")

    @property
    def hyper_params(self) -> tuple[float, float, float]:
        """``(a, b, c)`` of the non-negative-term 2F1."""
        return (self.m + 1) / 2, (self.n1 + self.n2) / 2, (self.n1 + self.m + 1) / 2

    def swapped(self) -> "ProblemSpec":
        """Roles of the two samples exchanged (for the smallest root)."""
        return ProblemSpec(self.m, self.n2, self.n1, tuple(1.0 / b for b in self.beta))

    def has_ties(self, gap: float = DEFAULT_GAP) -> bool:
        srt = np.sort(np.asarray(self.beta))
        return bool(np.any(np.diff(srt) <= gap * np.maximum(1.0, srt[1:])))

    def argument(self, x: float) -> np.ndarray:
        beta = np.asarray(self.beta)
        return x / (beta + x)


@dataclass
class IntegratorConfig:
    q0: float = 0.3
    series_error: float = DEFAULT_SERIES_ERROR
    x0value_min: float = 1e-60
    abs_err: float | None = 1e-10
    rel_err: float = 1e-10
    auto_abs_err: bool = True
    max_degree: int = DEFAULT_MAX_DEGREE
    h_init: float | None = None
    h_min: float = 1e-13
    max_steps: int = 200_000
    gap: float = DEFAULT_GAP
    max_retries: int = 20
    y_limit: float = 0.97

    def __post_init__(self):
        if not self.q0 > 0:
            raise ParameterError("q0 must be positive")
        for name in ("series_error", "x0value_min", "rel_err"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.abs_err is not None and not self.abs_err > 0:
            raise ParameterError("abs_err must be positive (or None for automatic)")


@dataclass
class HgmState:
    x: float
    y: np.ndarray
    F: np.ndarray
    log_prefactor: float
    series: SeriesResult | None = field(default=None, repr=False)

    @property
    def probability(self) -> float:
        return math.exp(self.log_prefactor) * float(self.F[0])


@dataclass
class CdfCurve:
    x: np.ndarray
    prob: np.ndarray
    density: np.ndarray
    x0: float
    raw_prob: np.ndarray = field(repr=False)
    warnings: list[str] = field(default_factory=list)
    n_steps: int = 0
    n_rejected: int = 0
    abs_err: float = 0.0

    def __iter__(self):
        return iter(zip(self.x.tolist(), self.prob.tolist()))


def _log_constant(spec: ProblemSpec) -> float:
    m, n1, n2 = spec.m, spec.n1, spec.n2
    return (log_multigamma(m, (n1 + n2) / 2) + log_multigamma(m, (m + 1) / 2)
            - log_multigamma(m, n2 / 2) - log_multigamma(m, (n1 + m + 1) / 2))


def log_prefactor(spec: ProblemSpec, x: float) -> float:
    """Natural log of the factor multiplying 2F1 in ``Pr(l_1 < x)``."""
    if not x > 0:
        raise DomainError("x must be positive")
    beta = np.asarray(spec.beta)
    return (_log_constant(spec) + spec.n1 * spec.m / 2 * math.log(x)
            + spec.n2 / 2 * float(np.sum(np.log(beta)))
            - (spec.n1 + spec.n2) / 2 * float(np.sum(np.log(beta + x))))


def _dlog_prefactor(spec: ProblemSpec, x: float) -> float:
    beta = np.asarray(spec.beta)
    return spec.n1 * spec.m / (2 * x) - (spec.n1 + spec.n2) / 2 * float(np.sum(1.0 / (beta + x)))


def series_probability(spec: ProblemSpec, x: float, max_degree: int = DEFAULT_MAX_DEGREE,
                       series_error: float = DEFAULT_SERIES_ERROR) -> tuple[float, SeriesResult]:
    """``Pr(l_1 < x)`` straight from the series (ties in ``beta`` allowed)."""
    a, b, c = spec.hyper_params
    res = pfq_truncated(HyperParams([a, b], [c]), spec.argument(x), max_degree, series_error)
    return math.exp(log_prefactor(spec, x)) * res.value, res


def initial_vector(spec: ProblemSpec, cfg: IntegratorConfig | None = None) -> tuple[float, HgmState]:
    """Series evaluation of ``F`` at an admissible starting point ``x0``.

    Starts from ``cfg.q0``.  ``x0`` is doubled while ``Pr(l_1 < x0)`` is
    below ``cfg.x0value_min`` and halved while some ``y_i(x0)`` exceeds
    ``cfg.y_limit`` or the series fails to converge within
    ``cfg.max_degree``.  Needing both moves is reported as an
    :class:`InitializationError`.
    """
    cfg = cfg or IntegratorConfig()
    if spec.has_ties(cfg.gap):
        raise DiagonalSingularityError(
            "beta has repeated eigenvalues; the Pfaffian system is singular on the diagonal "
            "x_i = x_j (use the series or null formulas instead)")
    a, b, c = spec.hyper_params
    params = HyperParams([a, b], [c])
    x0 = cfg.q0
    grew = shrank = 0
    reasons: list[str] = []
    log_min = math.log(cfg.x0value_min)
    while True:
        y = spec.argument(x0)
        move = 0
        if np.max(y) > cfg.y_limit:
            move = -1
            reasons.append(f"x0={x0:g}: argument {np.max(y):.4g} too close to 1")
        elif log_beta_cdf_bound(x0, spec.beta, spec.n1, spec.n2) < log_min:
            move = +1
            reasons.append(f"x0={x0:g}: Pr(l1 < x0) is below x0value_min")
        else:
            F, res = pfq_with_derivs(params, y, cfg.max_degree, cfg.series_error, full_output=True)
            lp = log_prefactor(spec, x0)
            if not res.converged:
                move = -1
                reasons.append(f"x0={x0:g}: series did not converge by degree {cfg.max_degree}")
            elif lp + math.log(F[0]) < log_min:
                move = +1
                reasons.append(f"x0={x0:g}: Pr(l1 < x0) = {math.exp(lp) * F[0]:.3g} "
                               f"is below x0value_min")
            else:
                logger.debug("initial point x0=%g, truncation degree %d", x0, res.truncation_degree)
                return x0, HgmState(x0, y, F, lp, res)
        if move > 0:
            grew += 1
            if shrank or grew > cfg.max_retries:
                break
            x0 *= 2
        else:
            shrank += 1
            if grew or shrank > cfg.max_retries:
                break
            x0 /= 2
    if grew and shrank:
        detail = ("Pr(l1 < x0) stays below x0value_min until some argument y_i(x0) "
                  f"exceeds {cfg.y_limit}; both constraints cannot hold")
    else:
        detail = f"gave up after {cfg.max_retries} retries"
    raise InitializationError(
        "the initial value is zero in double precision; too small initial value is not "
        f"acceptable for the Runge-Kutta method ({detail}). Last attempts: "
        + "; ".join(reasons[-3:]))


# Dormand-Prince 5(4)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


# dense Pfaffian matrices are cheaper up to this dimension
DENSE_MAX_M = 4
# Local error target as a fraction of (abs_err + rel_err |G|).  Global error
# accumulates over the steps; at 1.0 it came out 1-2.5x the tolerance on test
# specs, at 0.2 below 0.55x for ~35% more steps.
LOCAL_SAFETY = 0.2


class _System:
    def __init__(self, spec: ProblemSpec, gap: float):
        self.spec = spec
        self.beta = np.asarray(spec.beta)
        self.abc = spec.hyper_params
        self.gap = gap

    def matrix(self, x: float) -> np.ndarray:
        y = x / (self.beta + x)
        dy = self.beta / (self.beta + x) ** 2
        P = pfaffian_matrices(y, *self.abc, gap=self.gap)
        return np.tensordot(dy, P, axes=1)

    def rhs(self, x: float, F: np.ndarray) -> np.ndarray:
        """``sum_i dy_i/dx P_i(y(x)) F``."""
        if len(self.beta) <= DENSE_MAX_M:
            return self.matrix(x) @ F
        y = x / (self.beta + x)
        dy = self.beta / (self.beta + x) ** 2
        return pfaffian_apply(y, *self.abc, F, dy, gap=self.gap)


def integrate_cdf(spec: ProblemSpec, cfg: IntegratorConfig | None = None,
                  targets: Sequence[float] = (), state: HgmState | None = None) -> CdfCurve:
    """``Pr(l_1 < x)`` at each of the ascending ``targets`` by the HGM.

    The integrator lands exactly on every target.  Probabilities are clamped
    to [0, 1] in ``prob`` (``raw_prob`` keeps the unclamped values).  A
    :class:`ToleranceWarning` is issued when ``abs_err`` is not small
    compared with ``Pr(l_1 < x0)`` or when the curve comes out non-monotone.
    """
    cfg = cfg or IntegratorConfig()
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 1 or targets.size == 0:
        raise ParameterError("targets must be a non-empty 1-d sequence")
    if np.any(np.diff(targets) < 0):
        raise ParameterError("targets must be ascending")
    if state is None:
        _, state = initial_vector(spec, cfg)
    x0 = state.x
    if targets[0] < x0:
        raise ParameterError(f"targets must be >= the initial point x0={x0:g}")

    notes: list[str] = []
    pr0 = state.probability
    res = state.series
    auto = None
    if cfg.auto_abs_err or cfg.abs_err is None:
        if res is not None and len(res.partial_sums_by_degree) > 1 and res.value != 0:
            fk, fk1 = res.partial_sums_by_degree[-1], res.partial_sums_by_degree[-2]
            auto = abs(fk - fk1) * pr0 / abs(fk)
        else:
            auto = cfg.rel_err * pr0
        auto = max(auto, 1e-300)
    if cfg.abs_err is None:
        abs_err = auto
    elif auto is None:
        abs_err = cfg.abs_err
    else:
        abs_err = min(cfg.abs_err, auto)
    if cfg.abs_err is not None and cfg.abs_err >= pr0:
        action = (f"tightened to {abs_err:.3g}" if abs_err < cfg.abs_err
                  else "decrease abs_err or increase q0")
        msg = (f"abserr seems not to be small enough: abs_err={cfg.abs_err:.3g} is not below "
               f"Pr(l1 < x0)={pr0:.3g} at x0={x0:g}; {action}")
        notes.append(msg)
        warnings.warn(msg, ToleranceWarning, stacklevel=2)

    system = _System(spec, cfg.gap)
    rel = cfg.rel_err
    x = x0
    # probability = exp(log_scale) * G[0]
    log_scale = state.log_prefactor + math.log(F0 := float(state.F[0]))
    G = np.array(state.F, dtype=float) / F0

    def rhs(t: float, v: np.ndarray) -> np.ndarray:
        return system.rhs(t, v) + _dlog_prefactor(spec, t) * v

    k1 = rhs(x, G)
    span = targets[-1] - x0
    h = cfg.h_init if cfg.h_init else min(0.01 * x0, span / 10 if span > 0 else 0.01 * x0)
    h = max(h, 1e-6 * x0)
    n_steps = n_rejected = 0
    raw = np.empty(targets.size)
    dens = np.empty(targets.size)

    def record(idx: int) -> None:
        beta = system.beta
        dy = beta / (beta + x) ** 2
        first = np.array([G[1 << i] for i in range(spec.m)])
        scale = math.exp(log_scale)
        raw[idx] = scale * G[0]
        dens[idx] = scale * (_dlog_prefactor(spec, x) * G[0] + float(dy @ first))

    for idx, target in enumerate(targets):
        while x < target:
            if n_steps + n_rejected > cfg.max_steps:
                raise IntegrationError(f"more than {cfg.max_steps} steps before x={target:g}")
            step = min(h, target - x)
            last = step == target - x
            ks = [k1]
            for s in range(1, 7):
                Gs = G + step * sum(a * kk for a, kk in zip(_A[s], ks))
                ks.append(rhs(x + _C[s] * step, Gs))
            G_new = G + step * sum(b * kk for b, kk in zip(_B, ks) if b)
            err = step * sum(e * kk for e, kk in zip(_E, ks) if e)
            atol = abs_err * math.exp(min(700.0, -log_scale))
            tol = (atol + rel * np.maximum(np.abs(G), np.abs(G_new))) * LOCAL_SAFETY
            ratio = float(np.max(np.abs(err) / tol))
            if not np.isfinite(ratio):
                ratio = 1e10
            if ratio <= 1.0:
                x = target if last else x + step
                G = G_new
                k1 = ks[6]
                n_steps += 1
                peak = float(np.max(np.abs(G)))
                if peak > 1e100 or 0 < peak < 1e-100:
                    G = G / peak
                    k1 = k1 / peak
                    log_scale += math.log(peak)
                factor = 5.0 if ratio == 0 else min(5.0, 0.9 * ratio ** -0.2)
                # a step clipped to land on a target says little about the next one
                h = max(h, step * factor) if last else step * factor
            else:
                n_rejected += 1
                h = step * max(0.1, 0.9 * ratio ** -0.2)
                if h < cfg.h_min * max(1.0, abs(x)):
                    raise IntegrationError(
                        f"step size underflow at x={x:g}: abserr seems not to be small enough; "
                        "decrease abs_err or increase q0")
        record(idx)

    slack = 10 * rel
    if np.any(np.diff(raw) < -slack * np.maximum(1.0, np.abs(raw[1:]))) or np.any(raw < -slack) \
            or np.any(raw > 1 + slack):
        msg = ("abserr seems not to be small enough: the computed curve leaves [0, 1] or "
               "decreases; decrease abs_err or increase q0")
        notes.append(msg)
        warnings.warn(msg, ToleranceWarning, stacklevel=2)
    prob = np.clip(raw, 0.0, 1.0)
    return CdfCurve(targets.copy(), prob, dens, x0, raw, notes, n_steps, n_rejected, abs_err)
