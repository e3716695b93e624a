"""Existence checks, coefficient fields and simulation for spatial ARMA equations on Z^d."""
from .polycore import (DimensionError, LaurentPoly, ModelSpec, arma_polys, eval_poly,
                       eval_torus_grid, first_order_model, model_from_json, model_to_json)
from .spectral import (AliasingError, CoefficientField, DecayFit, TorusGrid, causal_alpha,
                       decay_fit, fourier_psi, h2_partial_norms, h2_verdict,
                       l2_spectral_sequence, zero_free_closed_polydisc, zero_search_torus)
from .noise import NoiseSpec, catalog, noise_from_name
from .existence import (ExistenceReport, bidisc_zero_free_bilinear, check_causal,
                        check_first_order_2d, check_linear_stationary)
from .delannoy import (DelannoyParams, asymptotic_decay_diagnostic, bessel_j01,
                       counting_function, delannoy_closed_a, delannoy_closed_b,
                       delannoy_recursive, delannoy_table, jacobi_delannoy_identity,
                       jacobi_poly, l1_sphere_count)
from .simulator import (FieldSample, LatticeWindow, arma_residual, klesov_field,
                        linear_field, nonunique_perturbation, rectangular_partial_sums,
                        residual_tail_bound, sample_noise, three_series_report)

__version__ = "0.1.0"
