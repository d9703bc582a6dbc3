"""Monte Carlo reference values for the roots of W1 W2^-1.

The root distribution depends on the covariances only through ``beta``, so
draws use ``W1 ~ W_m(n1, diag(beta))`` and ``W2 ~ W_m(n2, I)``.  Samples are
generated in fixed-size batches; batch ``j`` always uses the ``j``-th child
of ``SeedSequence(seed)`` with a Philox generator, so the result does not
depend on how many threads run the batches.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .hgm import ProblemSpec

__all__ = [
    "McEstimate",
    "sample_wishart",
    "sample_wishart_batch",
    "sample_roots",
    "empirical_max_root_cdf",
    "empirical_min_root_upper",
]

BATCH_SIZE = 20_000


@dataclass(frozen=True)
class McEstimate:
    probability: float
    standard_error: float
    n_samples: int
    seed: int

    @classmethod
    def from_count(cls, hits: int, n: int, seed: int) -> "McEstimate":
        p = hits / n
        return cls(p, math.sqrt(p * (1 - p) / n), n, seed)


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.Philox(rng))


def sample_wishart_batch(n: float, scale_eigs: Sequence[float], size: int, rng) -> np.ndarray:
    """``size`` draws of ``W_m(n, diag(scale_eigs))`` by the Bartlett decomposition."""
    d = np.asarray(scale_eigs, dtype=float)
    m = d.size
    if n < m:
        raise ParameterError(f"Wishart degrees of freedom must be >= m, got n={n}, m={m}")
    if np.any(d <= 0):
        raise ParameterError("scale eigenvalues must be positive")
    gen = _generator(rng)
    A = np.zeros((size, m, m))
    rows, cols = np.tril_indices(m, -1)
    A[:, rows, cols] = gen.standard_normal((size, rows.size))
    idx = np.arange(m)
    A[:, idx, idx] = np.sqrt(gen.chisquare(n - idx, size=(size, m)))
    A *= np.sqrt(d)[:, None]
    return A @ np.swapaxes(A, 1, 2)


def sample_wishart(n: float, scale_eigs: Sequence[float], rng) -> np.ndarray:
    """One draw of ``W_m(n, diag(scale_eigs))``."""
    return sample_wishart_batch(n, scale_eigs, 1, rng)[0]


def _batch_roots(spec: ProblemSpec, size: int, seq: np.random.SeedSequence) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(seq))
    W1 = sample_wishart_batch(spec.n1, spec.beta, size, gen)
    W2 = sample_wishart_batch(spec.n2, np.ones(spec.m), size, gen)
    # eigenvalues of the pencil (W1, W2) = those of L^-1 W1 L^-T with W2 = L L^T
    L = np.linalg.cholesky(W2)
    half = np.linalg.solve(L, W1)
    M = np.linalg.solve(L, np.swapaxes(half, 1, 2))
    M = 0.5 * (M + np.swapaxes(M, 1, 2))
    return np.linalg.eigvalsh(M)[:, ::-1]


def sample_roots(spec: ProblemSpec, n_samples: int, seed: int, batch_size: int = BATCH_SIZE,
                 workers: int = 1) -> np.ndarray:
    """Eigenvalues of ``W1 W2^-1`` for ``n_samples`` draws, each row in decreasing order."""
    if n_samples < 1:
        raise ParameterError("n_samples must be positive")
    sizes = [batch_size] * (n_samples // batch_size)
    if n_samples % batch_size:
        sizes.append(n_samples % batch_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, children))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _batch_roots(spec, *job), jobs))
    else:
        parts = [_batch_roots(spec, *job) for job in jobs]
    return np.concatenate(parts)


def _check(n_samples: int) -> None:
    if n_samples < 1000:
        raise ParameterError("n_samples must be at least 1000")


def empirical_max_root_cdf(spec: ProblemSpec, xs: Sequence[float], n_samples: int, seed: int,
                           workers: int = 1) -> list[McEstimate]:
    """Empirical ``Pr(l_1 <= x)`` at each ``x``, all from one shared sample."""
    _check(n_samples)
    l1 = np.sort(sample_roots(spec, n_samples, seed, workers=workers)[:, 0])
    hits = np.searchsorted(l1, np.asarray(xs, dtype=float), side="right")
    return [McEstimate.from_count(int(h), n_samples, seed) for h in hits]


def empirical_min_root_upper(spec: ProblemSpec, xs: Sequence[float], n_samples: int, seed: int,
                             workers: int = 1) -> list[McEstimate]:
    """Empirical ``Pr(l_m >= x)`` at each ``x``, all from one shared sample."""
    _check(n_samples)
    lm = np.sort(sample_roots(spec, n_samples, seed, workers=workers)[:, -1])
    below = np.searchsorted(lm, np.asarray(xs, dtype=float), side="left")
    return [McEstimate.from_count(n_samples - int(b), n_samples, seed) for b in below]
