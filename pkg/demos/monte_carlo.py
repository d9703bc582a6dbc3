"""HGM probabilities next to simulated Wishart pairs (N = 200000)."""

from hgmwishart import IntegratorConfig, ProblemSpec, integrate_cdf, max_root_cdf
from hgmwishart.dist import min_root_upper
from hgmwishart.oracle import empirical_max_root_cdf, empirical_min_root_upper

N, SEED = 200_000, 1

spec = ProblemSpec(3, 10, 20, (1.0, 2.0, 3.0))
xs = [2.0, 5.0, 10.0, 30.0]
curve = integrate_cdf(spec, IntegratorConfig(), xs)
print("largest root, beta = (1, 2, 3), n1 = 10, n2 = 20")
for x, p, e in zip(xs, curve.prob, empirical_max_root_cdf(spec, xs, N, SEED)):
    print(f"  Pr(l1 <= {x:4g}) = {p:.6f}   MC {e.probability:.6f} +- {e.standard_error:.6f}")

small = ProblemSpec(2, 6, 8, (1.0, 2.0))
xs = [0.1, 0.3, 1.0]
model = min_root_upper(small, xs, "auto", IntegratorConfig(series_error=1e-12))
print("\nsmallest root, beta = (1, 2), n1 = 6, n2 = 8")
for x, p, e in zip(xs, model, empirical_min_root_upper(small, xs, N, SEED)):
    print(f"  Pr(l2 >= {x:4g}) = {p:.6f}   MC {e.probability:.6f} +- {e.standard_error:.6f}")
