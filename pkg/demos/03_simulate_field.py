"""
Simulating a solution field
===========================

A truncated moving-average field, its ARMA residual, and the perturbation
that shows solutions need not be unique.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from spatial_arma import (LatticeWindow, ModelSpec, arma_residual, causal_alpha, decay_fit,
                          first_order_model, linear_field, nonunique_perturbation,
                          residual_tail_bound, sample_noise)
from spatial_arma.noise import gaussian

model = first_order_model(0.2, 0.2, 0.1)
coeffs = causal_alpha(model, 40)
coeffs.decay = decay_fit(coeffs)
print("decay envelope M, c:", coeffs.decay.M, coeffs.decay.c)

# %%
# Noise is keyed by lattice coordinates, so any window of the same seed sees
# the same innovations.  The residual Phi(B)Y - Z shrinks geometrically with
# the truncation and stays under the envelope bound.
win = LatticeWindow.box((64, 64))
Z = sample_noise(gaussian(), win, seed=7)
zsup = np.abs(sample_noise(gaussian(), LatticeWindow((-40, -40), win.upper), 7).values).max()
for N in (10, 20, 40):
    Y = linear_field(coeffs, gaussian(), win, N, seed=7)
    r = arma_residual(model, Y, Z).max_abs
    print(N, f"residual {r:.2e}", f"bound {residual_tail_bound(model, coeffs, N, zsup).value:.2e}")

# %%
# Adding exp(i t.lambda) where Phi(exp(-i lambda)) = 0 leaves the equation
# intact.  For Phi = 1 - z1/2 - z2/2 this happens at lambda = 0.
arma = ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5}, {(1, 0): -1.0, (0, 1): -1.0, (1, 1): 1.0})
Y = linear_field(causal_alpha(arma, 30), gaussian(), LatticeWindow.box((32, 32)), 30, 3)
Z = sample_noise(gaussian(), Y.window, 3)
base = arma_residual(arma, Y, Z).values
for lam in [(0.0, 0.0), (0.3, 0.3)]:
    moved = arma_residual(arma, nonunique_perturbation(Y, lam, 0.25), Z).values
    print(lam, "max change", np.abs(moved - base).max())

# %%
# Fields export as CSV and as an 8-bit PGM heatmap of |Y|.
out = Path(tempfile.mkdtemp())
(out / "field.pgm").write_bytes(Y.to_pgm())
print("wrote", out / "field.pgm")
