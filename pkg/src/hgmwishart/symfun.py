"""Partitions, generalized Pochhammer symbols and zonal polynomials.

Zonal polynomials use the ``C`` normalization, fixed by

    sum over partitions kappa of k of C_kappa(X) = (tr X)^k.

Each ``C_kappa`` is stored as an expansion in monomial symmetric functions
``m_lambda``.  The coefficients come from the eigen-recurrence of the
Laplace-Beltrami operator (all terms are positive, so the recurrence is also
stable in floating point) and the leading coefficient comes from the hook
formula ``2^k k! / prod_s (2 a(s) + l(s) + 2)``.

Partitions are plain tuples of positive integers, weakly decreasing, with no
trailing zeros.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Partition",
    "ZonalExpansion",
    "as_partition",
    "conjugate",
    "dominates",
    "enumerate_partitions",
    "gen_pochhammer",
    "zonal_expansion",
    "zonal_eval",
    "zonal_partial_eval",
    "zonal_table",
    "monomial_eval",
    "monomial_jets",
    "MonomialJets",
    "subset_bits",
]

Partition = tuple


def as_partition(parts: Iterable[int]) -> Partition:
    """Normalize ``parts`` to a partition tuple (sorted, zeros stripped)."""
    out = sorted((int(p) for p in parts), reverse=True)
    if out and out[-1] < 0:
        raise ValueError(f"negative part in {parts!r}")
    return tuple(p for p in out if p > 0)


def enumerate_partitions(k: int, max_parts: int, max_part: int | None = None) -> list[Partition]:
    """All partitions of ``k`` with at most ``max_parts`` parts.

    Parts are capped at ``max_part`` when given.  The result is in reverse
    lexicographic order, e.g. ``(3,), (2, 1), (1, 1, 1)``.
    """
    if k < 0 or max_parts < 1:
        raise ValueError("need k >= 0 and max_parts >= 1")
    cap = k if max_part is None else min(k, max_part)
    out: list[Partition] = []

    def rec(remaining: int, largest: int, prefix: tuple) -> None:
        if remaining == 0:
            out.append(prefix)
            return
        if len(prefix) == max_parts:
            return
        for p in range(min(remaining, largest), 0, -1):
            rec(remaining - p, p, prefix + (p,))

    rec(k, cap, ())
    return out


def conjugate(kappa: Sequence[int]) -> Partition:
    if not kappa:
        return ()
    return tuple(sum(1 for p in kappa if p > j) for j in range(kappa[0]))


def dominates(kappa: Sequence[int], lam: Sequence[int]) -> bool:
    """True when ``lam <= kappa`` in dominance order (equal weights assumed)."""
    s_k = s_l = 0
    for i in range(max(len(kappa), len(lam))):
        s_k += kappa[i] if i < len(kappa) else 0
        s_l += lam[i] if i < len(lam) else 0
        if s_l > s_k:
            return False
    return True


def gen_pochhammer(a: float, kappa: Sequence[int]) -> float:
    """Generalized Pochhammer symbol ``(a)_kappa`` for Jack parameter 2.

    ``prod_i prod_{j=1..kappa_i} (a - (i-1)/2 + j - 1)``.  Works with
    :class:`fractions.Fraction` input as well, giving an exact result.
    """
    out = 1 if isinstance(a, (int, Fraction)) else 1.0
    half = Fraction(1, 2) if isinstance(a, (int, Fraction)) else 0.5
    for i, part in enumerate(kappa):
        base = a - i * half
        for j in range(part):
            out *= base + j
    return out


def _rho(kappa: Sequence[int]) -> int:
    return sum(p * (p - i - 1) for i, p in enumerate(kappa))


def _hook_denominator(kappa: Sequence[int]) -> list[int]:
    """Factors ``2 a(s) + l(s) + 2`` over the cells of ``kappa``."""
    conj = conjugate(kappa)
    return [2 * (part - j - 1) + (conj[j] - i - 1) + 2
            for i, part in enumerate(kappa) for j in range(part)]


def _leading_coefficient(kappa: Sequence[int]) -> Fraction:
    k = sum(kappa)
    num = 2**k * math.factorial(k)
    return Fraction(num, math.prod(_hook_denominator(kappa)))


def _log_leading_coefficient(kappa: Sequence[int]) -> float:
    k = sum(kappa)
    return k * math.log(2.0) + math.lgamma(k + 1) - sum(math.log(h) for h in _hook_denominator(kappa))


def _raisings(lam: Sequence[int]):
    """Yield ``(mu, weight)`` for the eigen-recurrence of the coefficients.

    ``mu`` moves ``t`` boxes from row ``j`` to an earlier row ``i``; the
    weight is ``(lam_i + t) - (lam_j - t)``.
    """
    n = len(lam)
    for j in range(1, n):
        for i in range(j):
            for t in range(1, lam[j] + 1):
                mu = list(lam)
                mu[i] += t
                mu[j] -= t
                yield as_partition(mu), lam[i] - lam[j] + 2 * t


@dataclass(frozen=True)
class ZonalExpansion:
    """``C_kappa`` as ``sum_lambda coefficients[lambda] * m_lambda``."""

    kappa: Partition
    coefficients: Mapping[Partition, Fraction] = field(repr=False)

    def evaluate(self, x: Sequence[float]) -> float:
        return sum(float(c) * monomial_eval(lam, x)
                   for lam, c in self.coefficients.items() if len(lam) <= len(x))

    def partial(self, subset: Iterable[int], x: Sequence[float]) -> float:
        bits = subset_bits(subset)
        total = 0.0
        for lam, c in self.coefficients.items():
            if len(lam) <= len(x):
                total += float(c) * monomial_jets([lam], x)[0, bits]
        return total


_EXACT_LOCK = threading.Lock()
_EXACT_CACHE: dict[tuple[Partition, int], ZonalExpansion] = {}


def zonal_expansion(kappa: Sequence[int], max_parts: int | None = None) -> ZonalExpansion:
    """Exact monomial expansion of ``C_kappa``.

    Only monomials with at most ``max_parts`` parts are kept (default: all),
    which is what an evaluation in ``max_parts`` variables needs.  Results are
    cached; the cache is guarded by a lock so concurrent callers are safe.
    """
    kappa = as_partition(kappa)
    k = sum(kappa)
    limit = k if max_parts is None else min(max_parts, k)
    if len(kappa) > limit:
        return ZonalExpansion(kappa, {})
    key = (kappa, limit)
    with _EXACT_LOCK:
        hit = _EXACT_CACHE.get(key)
    if hit is not None:
        return hit
    coeffs: dict[Partition, Fraction] = {kappa: _leading_coefficient(kappa)}
    if k > 0:
        rho_k = _rho(kappa)
        for lam in enumerate_partitions(k, max(limit, 1)):
            if lam >= kappa or not dominates(kappa, lam):
                continue
            acc = Fraction(0)
            for mu, w in _raisings(lam):
                c = coeffs.get(mu)
                if c:
                    acc += w * c
            coeffs[lam] = acc / (rho_k - _rho(lam))
    expansion = ZonalExpansion(kappa, {lam: c for lam, c in coeffs.items() if c})
    with _EXACT_LOCK:
        _EXACT_CACHE.setdefault(key, expansion)
    return expansion


def monomial_eval(lam: Sequence[int], x: Sequence[float]) -> float:
    """Monomial symmetric function ``m_lambda(x)``."""
    m = len(x)
    if len(lam) > m:
        return 0.0
    padded = tuple(lam) + (0,) * (m - len(lam))
    return float(sum(math.prod(xi**e for xi, e in zip(x, perm))
                     for perm in set(itertools.permutations(padded))))


def subset_bits(subset: Iterable[int]) -> int:
    """Encode a set of 1-based coordinate indices as a bitmask (bit k-1 for k)."""
    bits = 0
    for k in subset:
        if k < 1:
            raise ValueError("coordinate indices are 1-based")
        if bits & (1 << (k - 1)):
            raise ValueError("indices must be distinct")
        bits |= 1 << (k - 1)
    return bits


class MonomialJets:
    """Memoized mixed partials of ``m_lambda`` at a fixed point.

    With ``derivs=False`` only the values are produced (arrays of length 1)
    through exactly the same floating-point operations as the ``J = {}``
    component of the derivative mode.
    """

    def __init__(self, x: np.ndarray, derivs: bool):
        self.x = x
        self.m = len(x)
        self.derivs = derivs
        self._memo: dict[tuple[int, Partition], np.ndarray | None] = {}
        self._pow: list[list[float]] = [[1.0] for _ in range(self.m)]

    def _power(self, var: int, e: int) -> float:
        table = self._pow[var]
        while len(table) <= e:
            table.append(table[-1] * self.x[var])
        return table[e]

    def jet(self, n: int, nu: Partition) -> np.ndarray | None:
        if len(nu) > n:
            return None
        if n == 0:
            return np.ones(1)
        key = (n, nu)
        if key in self._memo:
            return self._memo[key]
        half = (1 << (n - 1)) if self.derivs else 1
        out = np.zeros(2 * half if self.derivs else 1)
        choices = sorted(set(nu), reverse=True)
        if len(nu) < n:
            choices.append(0)
        for p in choices:
            if p:
                idx = nu.index(p)
                rest = nu[:idx] + nu[idx + 1:]
            else:
                rest = nu
            sub = self.jet(n - 1, rest)
            if sub is None:
                continue
            out[:half] += self._power(n - 1, p) * sub
            if self.derivs and p:
                out[half:] += p * self._power(n - 1, p - 1) * sub
        self._memo[key] = out
        return out

    def matrix(self, partitions: Sequence[Partition]) -> np.ndarray:
        dim = (1 << self.m) if self.derivs else 1
        res = np.zeros((len(partitions), dim))
        for r, lam in enumerate(partitions):
            j = self.jet(self.m, lam)
            if j is not None:
                res[r] = j
        return res


def monomial_jets(partitions: Sequence[Partition], x: Sequence[float]) -> np.ndarray:
    """Mixed first-order partials of monomial symmetric functions.

    Returns an array of shape ``(len(partitions), 2**m)`` whose entry
    ``[r, bits]`` is ``prod_{k in J} d/dx_k  m_{partitions[r]}`` at ``x``,
    with ``J`` encoded by ``bits``.  Computed by peeling off one variable at
    a time; multiplication by ``(x_n + eps_n)^p`` with ``eps_n**2 == 0``
    carries the derivative parts exactly.
    """
    return MonomialJets(np.asarray(x, dtype=float), derivs=True).matrix(
        [tuple(lam) for lam in partitions])


def zonal_eval(kappa: Sequence[int], x: Sequence[float]) -> float:
    """``C_kappa(diag(x))``; zero when ``kappa`` has more parts than ``len(x)``."""
    kappa = as_partition(kappa)
    if len(kappa) > len(x):
        return 0.0
    return zonal_expansion(kappa, len(x)).evaluate(x)


def zonal_partial_eval(kappa: Sequence[int], subset: Iterable[int], x: Sequence[float]) -> float:
    """``prod_{j in subset} d/dx_j C_kappa`` at ``x`` (``subset`` is 1-based)."""
    kappa = as_partition(kappa)
    subset = tuple(subset)
    if any(not 1 <= j <= len(x) for j in subset):
        raise ValueError("subset index out of range")
    if len(kappa) > len(x):
        return 0.0
    expansion = zonal_expansion(kappa, len(x))
    lams = list(expansion.coefficients)
    if not lams:
        return 0.0
    jets = monomial_jets(lams, x)[:, subset_bits(subset)]
    return float(sum(float(expansion.coefficients[lam]) * v for lam, v in zip(lams, jets)))


_TABLE_LOCK = threading.Lock()
_TABLE_CACHE: dict[tuple[int, int], tuple[tuple[Partition, ...], np.ndarray]] = {}
_TABLE_BYTES = 0
TABLE_CACHE_LIMIT = 512 * 2**20


def _build_zonal_table(k: int, m: int) -> tuple[tuple[Partition, ...], np.ndarray]:
    parts = enumerate_partitions(k, m)
    n = len(parts)
    if k == 0:
        return tuple(parts), np.ones((1, 1))
    index = {p: r for r, p in enumerate(parts)}
    padded = np.zeros((n, m), dtype=np.int64)
    for r, p in enumerate(parts):
        padded[r, :len(p)] = p
    cums = np.cumsum(padded, axis=1)
    rho = np.array([_rho(p) for p in parts], dtype=float)
    table = np.zeros((n, n))
    table[np.arange(n), np.arange(n)] = np.exp([_log_leading_coefficient(p) for p in parts])
    for c in range(1, n):
        lam = parts[c]
        cols: list[int] = []
        weights: list[float] = []
        for mu, w in _raisings(lam):
            cols.append(index[mu])
            weights.append(w)
        # rows kappa with lam < kappa in dominance; all lie before c in lex order
        rows = np.nonzero(np.all(cums[:c] >= cums[c], axis=1))[0]
        if rows.size == 0 or not cols:
            continue
        acc = table[np.ix_(rows, cols)] @ np.asarray(weights, dtype=float)
        table[rows, c] = acc / (rho[rows] - rho[c])
    return tuple(parts), table


def zonal_table(k: int, m: int) -> tuple[tuple[Partition, ...], np.ndarray]:
    """Float coefficient matrix of all ``C_kappa``, ``kappa`` of ``k`` in ``m`` variables.

    Returns ``(partitions, table)``; row ``r`` holds the monomial coefficients
    of ``C_{partitions[r]}`` against columns indexed by the same list.  The
    table is upper triangular.  Callers must not mutate it.  Tables are
    cached until the cache holds ``TABLE_CACHE_LIMIT`` bytes; larger degrees
    are rebuilt on every call.
    """
    global _TABLE_BYTES
    m = min(m, k) if k else 1
    key = (k, m)
    with _TABLE_LOCK:
        hit = _TABLE_CACHE.get(key)
        if hit is not None:
            return hit
        entry = _build_zonal_table(k, m)
        entry[1].flags.writeable = False
        if _TABLE_BYTES + entry[1].nbytes <= TABLE_CACHE_LIMIT:
            _TABLE_CACHE[key] = entry
            _TABLE_BYTES += entry[1].nbytes
        return entry
