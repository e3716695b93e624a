"""
Weighted Delannoy numbers
=========================

The causal coefficients of the first-order planar model count weighted
lattice paths.  We compare three ways of computing them, check the Jacobi
polynomial identity, and watch how fast they decay.
"""

# %%
import math

import numpy as np

from spatial_arma.delannoy import (asymptotic_decay_diagnostic, counting_function,
                                   delannoy_closed_a, delannoy_closed_b, delannoy_table,
                                   jacobi_delannoy_identity)

# unit weights give the classical Delannoy numbers 1, 3, 13, 63, ...
print(np.diag(delannoy_table((1, 1, 1), 5, 5)))

# %%
# The two closed forms are alternating sums for most weights.  They are
# summed in floating point and recomputed exactly when cancellation would
# cost accuracy, so they agree with the recursion to the last few digits.
p = (0.88706501, -0.28115793, 0.56961082)
t = delannoy_table(p, 30, 30)
for n, k in [(9, 16), (20, 20), (30, 3)]:
    print(n, k, t[n, k], delannoy_closed_a(p, n, k), delannoy_closed_b(p, n, k))

# %%
# Along the diagonals k + beta the numbers are Jacobi polynomials evaluated
# at -2 phi1 phi2 / phi3 - 1.
q = (0.5, 0.3, 0.1)
for beta in (0, 2, 5):
    print(beta, [f"{jacobi_delannoy_identity(q, beta, k)[2]:.1e}" for k in (0, 10, 40)])

# %%
# For points inside (-1, 1) the Jacobi polynomials approach a Bessel
# function; the residual of the leading term falls off like a power of n.
d = asymptotic_decay_diagnostic(math.pi / 2, 0, range(20, 400, 20))
print(f"log-log slope {d.slope:.3f}, max n*residual {d.scaled_max:.3e}")

# %%
# The counting function f(x) = #{(n, k) : 1/|psi| <= x} grows like log^2 x
# whenever two weights are active.  This is why a second log-moment is needed.
for p in [(0, 0.5, 0.25), (0.5, 0.3, 0.1), (0.5, 0.5, -0.5)]:
    print(p, [round(counting_function(p, 10.0**e) / math.log(10.0**e) ** 2, 3)
              for e in range(1, 7)])
