"""Pfaffian system of Muirhead's equations for 2F1 of a matrix argument.

2F1(a, b; c; x_1..x_m) is annihilated by

    g_i = d_i^2 + [p(x_i) + sum_{j!=i} q2(x_i, x_j)] d_i
          - sum_{j!=i} q(x_i, x_j) d_j - r(x_i),      i = 1..m.

The basis vector ``F`` holds ``d_J 2F1`` for every subset ``J`` of [m],
stored at index ``bits(J)`` (coordinate k <-> bit k-1).  ``d_i F = P_i F``:
rows of ``P_i`` for subsets without ``i`` are unit rows; rows for subsets
``I = J + {i}`` come from reducing ``d_i^2 d_J`` with ``d_J g_i``, which
recursively needs ``d_k^2 d_{J-{k}}`` for ``k`` in ``J``.

Coordinates are 1-based in the public functions, matching the subset
notation; arrays are 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DiagonalSingularityError, SingularityError

__all__ = [
    "DEFAULT_GAP",
    "PfaffianMatrix",
    "coeff_p",
    "coeff_q2",
    "coeff_q",
    "coeff_r",
    "dcoeff_q2",
    "dcoeff_q",
    "check_point",
    "reduce_second_derivative",
    "build_pfaffian",
    "pfaffian_matrices",
    "pfaffian_apply",
    "integrability_residual",
]

DEFAULT_GAP = 1e-8


def coeff_p(xi: float, a: float, b: float, c: float, m: int) -> float:
    if xi == 0 or xi == 1:
        raise SingularityError(f"p(x) is singular at x = {xi}")
    h = (m - 1) / 2
    return (c - h - (a + b + 1 - h) * xi) / (xi * (1 - xi))


def coeff_q2(xi: float, xj: float) -> float:
    if xi == xj:
        raise DiagonalSingularityError("singularity in the diagonal region x_i = x_j")
    return 1.0 / (2.0 * (xi - xj))


def coeff_q(xi: float, xj: float) -> float:
    if xi == xj:
        raise DiagonalSingularityError("singularity in the diagonal region x_i = x_j")
    if xi == 0 or xi == 1:
        raise SingularityError(f"q(x_i, x_j) is singular at x_i = {xi}")
    return xj * (1 - xj) / (2.0 * xi * (1 - xi) * (xi - xj))


def coeff_r(xi: float, a: float, b: float) -> float:
    if xi == 0 or xi == 1:
        raise SingularityError(f"r(x) is singular at x = {xi}")
    return a * b / (xi * (1 - xi))


def dcoeff_q2(xi: float, xj: float) -> float:
    """``d q2(x_i, x_j) / d x_j``."""
    if xi == xj:
        raise DiagonalSingularityError("singularity in the diagonal region x_i = x_j")
    return 1.0 / (2.0 * (xi - xj) ** 2)


def dcoeff_q(xi: float, xj: float) -> float:
    """``d q(x_i, x_j) / d x_j``."""
    if xi == xj:
        raise DiagonalSingularityError("singularity in the diagonal region x_i = x_j")
    if xi == 0 or xi == 1:
        raise SingularityError(f"q(x_i, x_j) is singular at x_i = {xi}")
    return (xi - 2 * xi * xj + xj * xj) / (2.0 * xi * (1 - xi) * (xi - xj) ** 2)


def check_point(x: Sequence[float], gap: float = DEFAULT_GAP) -> np.ndarray:
    """Validate an evaluation point: inside (0, 1)^m with separated coordinates."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("point must be a vector")
    if np.any(x <= 0) or np.any(x >= 1):
        raise SingularityError(f"coordinates must lie in (0, 1), got {x}")
    srt = np.sort(x)
    if len(x) > 1 and np.min(np.diff(srt)) < gap:
        raise DiagonalSingularityError(
            f"coordinates closer than {gap}: singularity in the diagonal region x_i = x_j")
    return x


def _bit(k: int) -> int:
    return 1 << (k - 1)


def reduce_second_derivative(i: int, subset_bits: int, x: Sequence[float],
                             a: float, b: float, c: float,
                             memo: dict | None = None,
                             gap: float = DEFAULT_GAP) -> dict[int, float]:
    """Express ``d_i^2 d_J`` in the subset basis modulo the left ideal.

    ``i`` is 1-based, ``subset_bits`` encodes ``J`` and must not contain
    ``i``.  Returns ``{bits(S): coefficient}``.  ``memo`` (keyed by
    ``(i, J)``) may be shared between calls at the same point.
    """
    x = check_point(x, gap)
    m = len(x)
    if not 1 <= i <= m:
        raise ValueError("direction out of range")
    if subset_bits & _bit(i):
        raise ValueError("J must not contain i")
    if memo is None:
        memo = {}
    return _reduce(i, subset_bits, x, a, b, c, m, memo)


def _reduce(i, jbits, x, a, b, c, m, memo):
    key = (i, jbits)
    hit = memo.get(key)
    if hit is not None:
        return hit
    xi = x[i - 1]
    row: dict[int, float] = {}

    def add(col: int, val: float) -> None:
        row[col] = row.get(col, 0.0) + val

    ibits = jbits | _bit(i)
    diag = coeff_p(xi, a, b, c, m)
    for k in range(1, m + 1):
        if k != i:
            diag += coeff_q2(xi, x[k - 1])
    add(ibits, -diag)
    add(jbits, coeff_r(xi, a, b))
    for k in range(1, m + 1):
        if k == i:
            continue
        xk = x[k - 1]
        if jbits & _bit(k):
            add(ibits ^ _bit(k), -dcoeff_q2(xi, xk))
            add(jbits, dcoeff_q(xi, xk))
            qk = coeff_q(xi, xk)
            for col, val in _reduce(k, jbits ^ _bit(k), x, a, b, c, m, memo).items():
                add(col, qk * val)
        else:
            add(jbits | _bit(k), coeff_q(xi, xk))
    memo[key] = row
    return row


@dataclass
class PfaffianMatrix:
    """Sparse ``P_i(x)``: ``entries[(row_bits, col_bits)] = value``."""

    direction: int
    point: np.ndarray
    entries: Mapping[tuple[int, int], float] = field(repr=False)

    @property
    def size(self) -> int:
        return 1 << len(self.point)

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.size, self.size))
        for (r, col), v in self.entries.items():
            out[r, col] = v
        return out

    def unit_rows(self) -> list[int]:
        """Rows that are a single 1 (subsets not containing the direction)."""
        bit = _bit(self.direction)
        return [s for s in range(self.size) if not s & bit]


def build_pfaffian(i: int, x: Sequence[float], a: float, b: float, c: float,
                   memo: dict | None = None, gap: float = DEFAULT_GAP) -> PfaffianMatrix:
    """``P_i(x)`` as a sparse matrix, ``i`` 1-based."""
    x = check_point(x, gap)
    m = len(x)
    if not 1 <= i <= m:
        raise ValueError("direction out of range")
    if memo is None:
        memo = {}
    bit = _bit(i)
    entries: dict[tuple[int, int], float] = {}
    for s in range(1 << m):
        if s & bit:
            for col, v in _reduce(i, s ^ bit, x, a, b, c, m, memo).items():
                if v != 0.0:
                    entries[(s, col)] = v
        else:
            entries[(s, s | bit)] = 1.0
    return PfaffianMatrix(i, x.copy(), entries)


def _pair_tables(x: np.ndarray):
    m = len(x)
    xi = x[:, None]
    xj = x[None, :]
    off = ~np.eye(m, dtype=bool)
    diff = np.where(off, xi - xj, 1.0)
    q2 = np.where(off, 0.5 / diff, 0.0)
    dq2 = np.where(off, 0.5 / diff**2, 0.0)
    w = xi * (1 - xi)
    q = np.where(off, xj * (1 - xj) / (2 * w * diff), 0.0)
    dq = np.where(off, (xi - 2 * xi * xj + xj * xj) / (2 * w * diff**2), 0.0)
    return q2, dq2, q, dq


def pfaffian_matrices(x: Sequence[float], a: float, b: float, c: float,
                      gap: float = DEFAULT_GAP) -> np.ndarray:
    """All ``P_i(x)`` as a dense array of shape ``(m, 2**m, 2**m)``.

    Same reduction as :func:`reduce_second_derivative`, organized by the
    size of ``J`` so every recursive row is ready when needed.
    """
    x = check_point(x, gap)
    m = len(x)
    dim = 1 << m
    h = (m - 1) / 2
    w = x * (1 - x)
    p = (c - h - (a + b + 1 - h) * x) / w
    r = a * b / w
    q2, dq2, q, dq = _pair_tables(x)
    diag = p + q2.sum(axis=1)
    # rows[i, J] = reduction of d_i^2 d_J  (J without i)
    rows = np.zeros((m, dim, dim))
    order = sorted(range(dim), key=lambda s: bin(s).count("1"))
    for jbits in order:
        for i in range(m):
            if jbits >> i & 1:
                continue
            row = rows[i, jbits]
            row[jbits | 1 << i] -= diag[i]
            row[jbits] += r[i]
            for k in range(m):
                if k == i:
                    continue
                if jbits >> k & 1:
                    row[(jbits | 1 << i) ^ 1 << k] -= dq2[i, k]
                    row[jbits] += dq[i, k]
                    row += q[i, k] * rows[k, jbits ^ 1 << k]
                else:
                    row[jbits | 1 << k] += q[i, k]
    out = np.zeros((m, dim, dim))
    for i in range(m):
        bit = 1 << i
        for s in range(dim):
            if s & bit:
                out[i, s] = rows[i, s ^ bit]
            else:
                out[i, s, s | bit] = 1.0
    return out


_LEVELS: dict[int, list[np.ndarray]] = {}


def _levels(m: int) -> list[np.ndarray]:
    hit = _LEVELS.get(m)
    if hit is None:
        counts = np.array([bin(s).count("1") for s in range(1 << m)])
        hit = [np.nonzero(counts == n)[0] for n in range(m + 1)]
        _LEVELS[m] = hit
    return hit


def pfaffian_apply(x: Sequence[float], a: float, b: float, c: float, F: np.ndarray,
                   weights: Sequence[float], gap: float = DEFAULT_GAP) -> np.ndarray:
    """``sum_i weights[i] * P_i(x) @ F`` without forming the matrices.

    The reduction of ``d_i^2 d_J`` is applied to ``F`` directly, one subset
    size at a time and vectorized over all pairs ``(i, J)`` of that size;
    this costs O(m^2 2^m) instead of the O(m 4^m) of a dense product.
    """
    x = check_point(x, gap)
    m = len(x)
    F = np.asarray(F, dtype=float)
    h = (m - 1) / 2
    w = x * (1 - x)
    p = (c - h - (a + b + 1 - h) * x) / w
    r = a * b / w
    q2, dq2, q, dq = _pair_tables(x)
    diag = p + q2.sum(axis=1)
    # red[i, J] = (reduced d_i^2 d_J) . F, defined for J without i
    red = np.zeros((m, 1 << m))
    for level in _levels(m)[:m]:
        ii = np.repeat(np.arange(m), level.size)
        jj = np.tile(level, m)
        keep = (jj >> ii) & 1 == 0
        ii, jj = ii[keep], jj[keep]
        ibits = jj | (1 << ii)
        val = -diag[ii] * F[ibits] + r[ii] * F[jj]
        for k in range(m):
            kb = 1 << k
            inside = ((jj & kb) != 0)
            outside = ~inside & (ii != k)
            if inside.any():
                i_in, j_in = ii[inside], jj[inside]
                val[inside] += (-dq2[i_in, k] * F[(j_in | (1 << i_in)) ^ kb]
                                + dq[i_in, k] * F[j_in]
                                + q[i_in, k] * red[k, j_in ^ kb])
            if outside.any():
                i_out, j_out = ii[outside], jj[outside]
                val[outside] += q[i_out, k] * F[j_out | kb]
        red[ii, jj] = val
    out = np.zeros(1 << m)
    subsets = np.arange(1 << m)
    for i, wi in enumerate(weights):
        if wi == 0:
            continue
        bit = 1 << i
        has = (subsets & bit) != 0
        out[~has] += wi * F[subsets[~has] | bit]
        out[has] += wi * red[i, subsets[has] ^ bit]
    return out


def integrability_residual(x: Sequence[float], a: float, b: float, c: float,
                           step: float = 1e-5) -> float:
    """``max |dP_j/dx_i - dP_i/dx_j + P_j P_i - P_i P_j|`` over all pairs.

    The partial derivatives of ``P`` are five-point central differences with
    spacing ``step``; the three-point rule's O(step^2) error is too large
    near the diagonal, where the entries behave like ``1/(x_i - x_j)^2``.
    """
    x = np.asarray(x, dtype=float)
    m = len(x)
    base = pfaffian_matrices(x, a, b, c)
    grads = []
    for i in range(m):
        e = np.zeros(m)
        e[i] = step
        grads.append((8 * (pfaffian_matrices(x + e, a, b, c) - pfaffian_matrices(x - e, a, b, c))
                      - (pfaffian_matrices(x + 2 * e, a, b, c)
                         - pfaffian_matrices(x - 2 * e, a, b, c))) / (12 * step))
    worst = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            res = (grads[i][j] - grads[j][i]
                   + base[j] @ base[i] - base[i] @ base[j])
            worst = max(worst, float(np.max(np.abs(res))))
    return worst
