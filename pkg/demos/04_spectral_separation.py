"""
Square integrability on the torus
=================================

Whether Theta/Phi is square integrable decides whether a linear solution
can exist.  A zero of Phi on the torus is not enough to rule it out: it
depends on the dimension.
"""

# %%
from spatial_arma import ModelSpec, arma_polys, l2_spectral_sequence, zero_search_torus

# 1 - (z1 + ... + z5)/5 vanishes at (1, ..., 1), but in five dimensions the
# singularity 1/|t|^2 is integrable: the refinement increments collapse.
five = ModelSpec(5, {tuple(int(i == j) for i in range(5)): 0.2 for j in range(5)})
seq = l2_spectral_sequence(five, levels=2, base=12)
print(seq.verdict, seq.estimates)

# %%
# In two dimensions the same kind of zero is fatal.  Each refinement adds
# at least as much as the one before.
half = ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5})
seq = l2_spectral_sequence(half, levels=4, base=32)
print(seq.verdict, [round(v, 2) for v in seq.estimates])

# %%
# The zero search locates the common zero (1, 1), i.e. t = (0, 0).
rep = zero_search_torus(arma_polys(half)[0])
print(rep.zeros, rep.min_modulus)
