import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spatial_arma.polycore import (DimensionError, LaurentPoly, ModelSpec, arma_polys,
                                   eval_poly, eval_torus_grid, first_order_model,
                                   model_from_json, model_to_json)

finite = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


@st.composite
def polys(draw, dim=None, max_terms=20, lo=-3, hi=3):
    d = dim or draw(st.integers(1, 3))
    n = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(n):
        k = tuple(draw(st.integers(lo, hi)) for _ in range(d))
        terms[k] = complex(draw(finite), draw(finite))
    return LaurentPoly(d, terms)


def test_empty_model_gives_unit_polynomials():
    phi, theta = arma_polys(ModelSpec(2))
    assert phi.terms == {(0, 0): 1} and theta.terms == {(0, 0): 1}


def test_half_model_polynomial():
    phi, theta = arma_polys(ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5}))
    assert phi.terms == {(0, 0): 1, (0, 1): -0.5, (1, 0): -0.5}
    assert eval_poly(phi, (1, 1)) == 0


def test_first_order_polynomial():
    phi, _ = arma_polys(first_order_model(0.5, 0.3, 0.1))
    assert phi.coeff((1, 1)) == -0.1 and phi.coeff((1, 0)) == -0.5
    assert eval_poly(phi, (0, 0)) == 1
    z = (0.3 + 0.2j, -0.7j)
    expect = 1 - 0.5 * z[0] - 0.3 * z[1] - 0.1 * z[0] * z[1]
    assert abs(eval_poly(phi, z) - expect) < 1e-15


def test_constant_everywhere():
    one = LaurentPoly.constant(3)
    assert eval_poly(one, (5, -2j, 0.1)) == 1
    assert np.all(eval_torus_grid(one, 6) == 1)


def test_monomial_on_grid():
    vals = eval_torus_grid(LaurentPoly.monomial((1,)), 4)
    assert np.allclose(vals, np.exp(-1j * 2 * np.pi * np.arange(4) / 4), atol=1e-15)


def test_half_model_grid_minimum_is_zero():
    phi, _ = arma_polys(ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5}))
    for m in (64, 128, 256):
        assert np.min(np.abs(eval_torus_grid(phi, (m, m)))) == 0


def test_laurent_evaluation_with_negative_exponents():
    p = LaurentPoly(2, {(-1, 2): 2.0, (0, 0): 1.0})
    assert abs(eval_poly(p, (2.0, 3.0)) - (1 + 2 * 9 / 2)) < 1e-15
    with pytest.raises(ZeroDivisionError):
        eval_poly(p, (0.0, 1.0))


def test_dimension_errors():
    with pytest.raises(DimensionError):
        LaurentPoly(2, {(1,): 1.0})
    with pytest.raises(DimensionError):
        eval_poly(LaurentPoly.constant(2), (1.0,))
    with pytest.raises(DimensionError):
        LaurentPoly.constant(2) + LaurentPoly.constant(3)
    with pytest.raises(DimensionError):
        model_from_json('{"d": 2, "R": [[1, 0, 0]], "phi": [[0.5, 0]]}')


def test_model_validation():
    with pytest.raises(ValueError):
        ModelSpec(2, {(0, 0): 0.3})
    with pytest.raises(ValueError):
        LaurentPoly(1, {(2**21,): 1.0})
    with pytest.raises(ValueError):
        model_from_json('{"d": 2, "R": [[1, 0]], "phi": []}')
    with pytest.raises(ValueError):
        model_from_json("[1, 2]")


def test_causal_mode_and_max_shift():
    m = ModelSpec(2, {(1, 0): 0.2}, {(0, -2): 0.1})
    assert not m.is_causal_mode
    pos, neg = m.max_shift()
    assert list(pos) == [1, 0] and list(neg) == [0, 2]
    assert first_order_model(0.1, 0.2, 0.3).is_causal_mode


def test_json_round_trip():
    m = ModelSpec(2, {(1, 0): 0.5 + 0.25j, (0, 1): -0.3}, {(1, 1): 2.0})
    back = model_from_json(model_to_json(m))
    assert back == m
    # positional pairs and bare reals are both accepted
    alt = model_from_json('{"d": 1, "R": [[1]], "phi": [0.5]}')
    assert alt.phi == {(1,): 0.5}


@settings(max_examples=40, deadline=None)
@given(polys(), st.data())
def test_grid_matches_pointwise(p, data):
    res = tuple(data.draw(st.integers(4, 24)) for _ in range(p.dim))
    grid = eval_torus_grid(p, res)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    scale = max(p.scale(), 1e-300)
    for _ in range(100):
        j = tuple(int(rng.integers(m)) for m in res)
        z = np.exp(-2j * np.pi * np.array(j) / np.array(res))
        assert abs(grid[j] - eval_poly(p, z)) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda d: st.tuples(polys(d, 6), polys(d, 6))), st.data())
def test_evaluation_is_multiplicative(pq, data):
    p, q = pq
    z = [complex(data.draw(st.floats(-1.2, 1.2)), data.draw(st.floats(-1.2, 1.2)))
         for _ in range(p.dim)]
    if any(abs(v) < 0.2 for v in z):
        z = [v + 0.5 for v in z]
    lhs = eval_poly(p * q, z)
    rhs = eval_poly(p, z) * eval_poly(q, z)

    def size(poly):
        return sum(abs(c) * np.prod([abs(zi) ** k for zi, k in zip(z, key)])
                   for key, c in poly.terms.items())
    assert abs(lhs - rhs) <= 1e-12 * (size(p) * size(q) + 1e-300)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(any),
                       finite.filter(lambda v: v != 0), max_size=5),
       st.dictionaries(st.tuples(st.integers(-2, 3), st.integers(0, 3)).filter(any),
                       finite, max_size=5))
def test_arma_polys_round_trip(phi, theta):
    m = ModelSpec(2, phi, theta)
    P, T = arma_polys(m)
    for k, c in phi.items():
        assert P.coeff(k) == -c
    for k, c in theta.items():
        assert T.coeff(k) == c
    assert P.coeff((0, 0)) == 1 and T.coeff((0, 0)) == 1
