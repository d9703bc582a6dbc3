"""Largest-root CDF for m = 3, n1 = 10, n2 = 20.

Two choices of beta: (1, 2, 3) behaves; (1, 20, 300) starts from a tiny
probability at x0 and needs a small absolute error.  Run from the repo root:

    python3 demos/example_curves.py
"""

import warnings

import numpy as np

from hgmwishart import IntegratorConfig, ProblemSpec, ToleranceWarning, integrate_cdf

xs = np.geomspace(0.3, 500, 12)


def show(title, spec, cfg):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ToleranceWarning)
        curve = integrate_cdf(spec, cfg, xs)
    print(f"\n{title}")
    print(f"  x0={curve.x0:g}, {curve.n_steps} steps, effective abserr {curve.abs_err:.3g}")
    for w in caught:
        print(f"  warning: {w.message}")
    for x, p in zip(curve.x, curve.raw_prob):
        print(f"  {x:10.4f}  {p:.10f}")
    mono = np.all(np.diff(curve.raw_prob) >= -1e-9)
    print(f"  monotone: {mono}")


show("beta = (1, 2, 3), defaults", ProblemSpec(3, 10, 20, (1, 2, 3)), IntegratorConfig())

hard = ProblemSpec(3, 10, 20, (1, 20, 300))
# without automatic tightening the loose absolute error spoils the curve
show("beta = (1, 20, 300), abserr 1e-10, no tightening", hard,
     IntegratorConfig(auto_abs_err=False))
show("beta = (1, 20, 300), abserr 1e-30", hard, IntegratorConfig(abs_err=1e-30))
