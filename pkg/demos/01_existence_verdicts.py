"""
When does a spatial ARMA equation have a solution?
===================================================

We ask the existence checkers about a handful of planar models and noise
laws, and read the evidence they attach to each verdict.
"""

# %%
# The first-order planar AR model Y_t = phi1 Y_{t-e1} + phi2 Y_{t-e2}
# + phi3 Y_{t-e1-e2} + Z_t has a complete answer: the symbol must be zero
# free on the closed bidisc, and the noise needs one log-moment when only
# one weight is nonzero, two otherwise.
from spatial_arma import ModelSpec, check_causal, check_first_order_2d, check_linear_stationary
from spatial_arma.noise import catalog, gaussian, log_pareto

for phi in [(0.2, 0.2, 0.1), (0.9, 0.0, 0.0), (0.5, 0.5, 0.0), (0.5, 0.3, 0.1)]:
    row = {name: check_first_order_2d(*phi, nz).verdict for name, nz in catalog().items()}
    print(phi, row)

# %%
# Each report lists the conditions it checked.  LogPareto(1.5) noise has a
# finite first log-moment but not a second, which is fatal for two weights
# and harmless for one.
rep = check_first_order_2d(0.2, 0.2, 0.1, log_pareto(1.5))
for c in rep.conditions:
    print(f"{c.status:>5}  {c.name}: {c.evidence}")

# %%
# Phi = 1 - z1/2 - z2/2 vanishes at (1, 1).  The torus quadrature of 1/|Phi|^2
# keeps growing under refinement, so no stationary solution exists at all.
half = ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5})
print(check_linear_stationary(half, gaussian()).to_json())

# %%
# With Theta = (1 - z1)(1 - z2) the quotient Theta/Phi stays bounded by 2 on
# the bidisc, so square-integrable zero-mean noise gives a causal solution
# even though Phi has a zero on the torus.
arma = ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5}, {(1, 0): -1.0, (0, 1): -1.0, (1, 1): 1.0})
rep = check_causal(arma, gaussian())
print(rep.verdict, "via leg", rep.leg)
print(rep.coefficients.values[:4, :4].real.round(4))
