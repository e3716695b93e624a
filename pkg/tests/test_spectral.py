import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spatial_arma.polycore import LaurentPoly, ModelSpec, arma_polys, first_order_model
from spatial_arma.spectral import (AliasingError, CoefficientField, TorusGrid, causal_alpha,
                                   classify_estimates, decay_fit, fourier_psi,
                                   h2_partial_norms, h2_verdict, l2_spectral_sequence,
                                   quadrature_mean, zero_free_closed_polydisc,
                                   zero_search_torus)

HALF = ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5})
QUARTER = ModelSpec(2, {(1, 0): 0.25, (0, 1): 0.25})
HALF_ARMA = ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5},
                      {(1, 0): -1.0, (0, 1): -1.0, (1, 1): 1.0})


# -- quadrature ---------------------------------------------------------------

def test_quadrature_of_constant_and_monomial():
    one = LaurentPoly.constant(2)
    assert quadrature_mean(one, one, 8)[0] == pytest.approx(1.0, abs=1e-15)
    z = LaurentPoly.monomial((1, 0))
    assert quadrature_mean(z + one, one, 8)[0] == pytest.approx(2.0, abs=1e-14)


def test_quadrature_geometric_oracle():
    # |1/(1 - 0.5 z)|^2 integrates to sum 0.25^n = 4/3
    phi, theta = arma_polys(ModelSpec(1, {(1,): 0.5}))
    assert quadrature_mean(theta, phi, 64)[0] == pytest.approx(4 / 3, abs=1e-12)


def test_half_model_diverges_with_growing_increments():
    seq = l2_spectral_sequence(HALF, levels=4, base=32)
    assert seq.verdict == "Divergent"
    assert np.all(np.diff(seq.estimates) > 0)
    assert seq.value is None


def test_bounded_quotient_is_finite_below_four():
    seq = l2_spectral_sequence(HALF_ARMA, levels=4, base=32)
    assert seq.verdict == "Finite"
    assert seq.value <= 4
    assert all(e <= 4 + 1e-6 for e in seq.estimates)


def test_classification_rule():
    assert classify_estimates([1, 1.5, 1.75, 1.875])[0] == "Finite"
    assert classify_estimates([1, 2, 3, 4])[0] == "Divergent"
    assert classify_estimates([1, 2, 2.2, 3])[0] == "Inconclusive"
    assert classify_estimates([1, 2])[0] == "Inconclusive"
    assert classify_estimates([2, 2, 2, 2])[0] == "Finite"


def test_spectral_json_and_levels():
    seq = l2_spectral_sequence(QUARTER, levels=2, base=16)
    assert seq.resolutions == [16, 32, 64]
    assert '"verdict": "Finite"' in seq.to_json()
    with pytest.raises(ValueError):
        l2_spectral_sequence(QUARTER, levels=1)


def test_parseval_consistency():
    model = first_order_model(0.3, -0.2, 0.25)
    seq = l2_spectral_sequence(model, levels=3, base=32)
    psi = fourier_psi(model, TorusGrid.uniform(2, 128), 12)
    assert seq.verdict == "Finite"
    assert np.sum(np.abs(psi.values) ** 2) <= seq.value + 1e-6


# -- Fourier coefficients --------------------------------------------------------

def test_fourier_geometric_oracle():
    model = ModelSpec(2, {(1, 0): 0.5})
    psi = fourier_psi(model, TorusGrid.uniform(2, 256), 20)
    expect = np.zeros(psi.values.shape)
    expect[20:, 20] = 0.5 ** np.arange(21)
    assert np.max(np.abs(psi.values - expect)) <= 1e-10


def test_fourier_of_identity_quotient():
    model = ModelSpec(2, {(1, 0): 0.3, (0, 1): -0.2}, {(1, 0): -0.3, (0, 1): 0.2})
    psi = fourier_psi(model, TorusGrid.uniform(2, 64), 5)
    assert abs(psi.get((0, 0)) - 1) <= 1e-14
    vals = psi.values.copy()
    vals[5, 5] = 0
    assert np.max(np.abs(vals)) <= 1e-14


def test_fourier_refuses_aliasing():
    with pytest.raises(AliasingError):
        fourier_psi(HALF, TorusGrid.uniform(2, 64), 4)
    with pytest.raises(ValueError):
        fourier_psi(QUARTER, TorusGrid.uniform(2, 32), 8)


def test_fourier_matches_causal_recursion():
    model = ModelSpec(2, {(1, 0): 0.3, (0, 1): 0.2, (2, 1): -0.1}, {(0, 1): 0.5})
    psi = fourier_psi(model, TorusGrid.uniform(2, 128), 10).restrict((0, 0), (10, 10))
    alpha = causal_alpha(model, 10)
    assert np.max(np.abs(psi.values - alpha.values)) <= 1e-8


# -- causal recursion and H2 ------------------------------------------------------

def test_causal_alpha_matches_delannoy_small_table():
    # hand-filled 3x3 table of the unit weights: classical Delannoy numbers
    alpha = causal_alpha(first_order_model(1, 1, 1), 2).values.real
    assert alpha.tolist() == [[1, 1, 1], [1, 3, 5], [1, 5, 13]]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-0.4, 0.4), min_size=4, max_size=4),
       st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_causal_alpha_independent_of_traversal(w, box):
    model = ModelSpec(3, {(1, 0, 0): w[0], (0, 1, 0): w[1], (0, 1, 1): w[2],
                          (1, 0, 2): w[3]})
    a = causal_alpha(model, [b + 3 for b in box], "lex").values
    b = causal_alpha(model, [b + 3 for b in box], "revlex").values
    assert np.array_equal(a, b)


def test_h2_partial_norms_oracles():
    delta = CoefficientField.delta(2)
    assert np.all(h2_partial_norms(delta, 5) == 1)
    geo = causal_alpha(ModelSpec(2, {(1, 0): 0.5}), 20)
    assert h2_partial_norms(geo, 20)[-1] == pytest.approx(4 / 3, abs=1e-6)
    bounded = h2_partial_norms(causal_alpha(HALF_ARMA, 60), 60)
    assert np.all(bounded <= 4)
    with pytest.raises(ValueError):
        h2_partial_norms(CoefficientField.delta(2, kind="full-lattice"), 3)


def test_h2_verdicts():
    assert h2_verdict(causal_alpha(QUARTER, 64))[0] == "Finite"
    assert h2_verdict(causal_alpha(HALF, 128))[0] == "Divergent"
    assert h2_verdict(causal_alpha(HALF_ARMA, 128))[0] == "Finite"


# -- zero searches ----------------------------------------------------------------

def test_torus_zero_of_half_model():
    rep = zero_search_torus(arma_polys(HALF)[0])
    assert rep.found
    assert np.max(np.abs(rep.zeros[0])) < 1e-6


def test_torus_search_without_zeros():
    rep = zero_search_torus(arma_polys(QUARTER)[0])
    assert not rep.found and rep.min_modulus >= 0.5 - 1e-12
    one = zero_search_torus(LaurentPoly.constant(2))
    assert not one.found and one.min_modulus == 1


@pytest.mark.parametrize("lam", [0.7, -2.1, 3.0])
def test_planted_torus_zero(lam):
    factor = LaurentPoly(2, {(0, 0): 1, (1, 0): -np.exp(1j * lam)})
    other = LaurentPoly(2, {(0, 0): 2, (0, 1): 0.5, (1, 1): 0.3j})
    rep = zero_search_torus(factor * other)
    assert rep.found
    h = 2 * np.pi / rep.resolution
    assert min(abs((z[0] - lam + np.pi) % (2 * np.pi) - np.pi) for z in rep.zeros) <= h


def test_closed_polydisc_reports():
    q = zero_free_closed_polydisc(arma_polys(QUARTER)[0])
    assert q.zero_free and q.min_modulus >= 0.5 - 1e-12
    h = zero_free_closed_polydisc(arma_polys(HALF)[0])
    assert h.kind == "ZeroFound"
    assert np.allclose(h.point, [1, 1], atol=1e-6)
    w = zero_free_closed_polydisc(LaurentPoly(2, {(0, 0): 1, (1, 1): -0.9}))
    assert w.zero_free and w.min_modulus == pytest.approx(0.1, abs=1e-9)
    inside = zero_free_closed_polydisc(arma_polys(first_order_model(0.2, 1.2, 0))[0])
    assert inside.kind == "ZeroFound"


# -- decay fits -------------------------------------------------------------------

def test_decay_fit_geometric():
    fit = decay_fit(causal_alpha(ModelSpec(2, {(1, 0): 0.5}), 30))
    assert abs(fit.c - math.log(2)) <= 0.05 * math.log(2)
    assert fit.M >= 1


def test_decay_fit_conventions():
    fit = decay_fit(CoefficientField.delta(2))
    assert fit.M == 1 and math.isinf(fit.c)
    k = np.add.outer(np.arange(21), np.arange(21))
    poly = CoefficientField(1.0 / (1.0 + k) ** 2, (0, 0), "causal-orthant")
    assert decay_fit(poly) is None


def test_decay_envelope_dominates():
    field = causal_alpha(first_order_model(0.4, 0.3, -0.2), 40)
    fit = decay_fit(field)
    assert np.all(np.abs(field.values) <= fit.envelope(field.l1_grid()) + 1e-300)


def test_coefficient_csv_order():
    field = CoefficientField(np.arange(4).reshape(2, 2), (-1, 0))
    rows = field.to_csv().splitlines()
    assert [r.split(",")[:2] for r in rows] == [["-1", "0"], ["-1", "1"], ["0", "0"], ["0", "1"]]
    assert rows[3].split(",")[2] == "3"
