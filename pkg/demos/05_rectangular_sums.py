"""
Rectangular convergence and the three-series test
=================================================

Multiple series can converge over squares and still diverge along other
rectangular paths.  We reproduce a classical counterexample and then ask
the three-series diagnostic whether the first-order solution converges.
"""

# %%
from spatial_arma import delannoy_table
from spatial_arma.delannoy import delannoy_field
from spatial_arma.noise import gaussian, log_pareto, two_point
from spatial_arma.simulator import (klesov_field, klesov_path_sums, klesov_square_sums,
                                    rectangular_partial_sums, three_series_report)

print(klesov_field(5, 3))
print("square sums:", klesov_square_sums(10))
print("row path (k, 1):", klesov_path_sums([(k, 1) for k in range(1, 11)]))

# %%
# Geometrically decaying coefficients converge absolutely, so every
# monotone path of rectangles gives the same limit.
rep = rectangular_partial_sums(delannoy_field((0.2, 0.2, 0.1), 40), two_point(), (0, 0),
                               paths=20, seed=1)
print("spread over paths with min(N) >= m:", rep.spread_by_level[[0, 5, 10, 20, 40]])

# %%
# Kolmogorov's three series at c = 1, with a decay envelope beyond the
# computed box.  Gaussian noise converges.  LogPareto(1.5) noise diverges
# because the counting function grows like log^2.
field = delannoy_field((0.5, 0.3, 0.1), 60)
for nz in (gaussian(), log_pareto(1.5)):
    print(nz.describe(), three_series_report(field, nz).verdict())
print(delannoy_table((0.5, 0.3, 0.1), 3, 3).round(3))
