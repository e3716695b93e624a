"""Laurent polynomials on Z^d and spatial ARMA model specifications.

A Laurent polynomial is stored sparsely as a mapping from exponent tuples to
complex coefficients.  ``{(0, 0): 1, (1, 0): -0.5, (0, 1): -0.5}`` is the
autoregressive polynomial ``1 - z1/2 - z2/2``.  Dense coefficient arrays are
built only for transform based evaluation on torus grids.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import fft as sp_fft

from ._threads import worker_count

__all__ = [
    "MAX_EXPONENT",
    "DimensionError",
    "LaurentPoly",
    "ModelSpec",
    "arma_polys",
    "eval_poly",
    "eval_torus_grid",
    "l1_norm",
    "model_from_json",
    "model_to_json",
    "first_order_model",
]

MAX_EXPONENT = 2**20


class DimensionError(ValueError):
    """Raised when multi-indices disagree with the ambient dimension."""


def l1_norm(k: Sequence[int]) -> int:
    return int(sum(abs(int(v)) for v in k))


def _as_index(key: Iterable[int], dim: int) -> tuple[int, ...]:
    k = tuple(int(v) for v in key)
    if len(k) != dim:
        raise DimensionError(f"multi-index {k} has length {len(k)}, expected {dim}")
    if any(abs(v) > MAX_EXPONENT for v in k):
        raise ValueError(f"exponent in {k} exceeds the supported range 2**20")
    return k


@dataclass(frozen=True)
class LaurentPoly:
    """Finitely supported complex coefficient map on Z^d.

    Zero coefficients are dropped at construction, so ``terms`` is exactly
    the support.
    """

    dim: int
    terms: Mapping[tuple[int, ...], complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        clean = {}
        for key, value in self.terms.items():
            k = _as_index(key, self.dim)
            c = complex(value)
            if c != 0:
                clean[k] = clean.get(k, 0j) + c
        clean = {k: v for k, v in sorted(clean.items()) if v != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def constant(cls, dim: int, value: complex = 1.0) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: complex = 1.0) -> "LaurentPoly":
        return cls(len(exponent), {tuple(exponent): coeff})

    def coeff(self, k: Sequence[int]) -> complex:
        return self.terms.get(tuple(k), 0j)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        """True when no exponent is negative."""
        return all(min(k) >= 0 for k in self.terms)

    def support_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Componentwise (min, max) exponents; the origin for the zero polynomial."""
        if not self.terms:
            z = np.zeros(self.dim, dtype=np.int64)
            return z, z.copy()
        keys = np.array(list(self.terms), dtype=np.int64)
        return keys.min(axis=0), keys.max(axis=0)

    def dense(self, lower=None, upper=None) -> tuple[np.ndarray, np.ndarray]:
        """Dense coefficient array over the box ``[lower, upper]`` and its offset."""
        lo, hi = self.support_box()
        if lower is not None:
            lo = np.minimum(lo, np.asarray(lower, dtype=np.int64))
        if upper is not None:
            hi = np.maximum(hi, np.asarray(upper, dtype=np.int64))
        arr = np.zeros(tuple(hi - lo + 1), dtype=complex)
        for k, c in self.terms.items():
            arr[tuple(np.asarray(k) - lo)] = c
        return arr, lo

    def scale(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return LaurentPoly(self.dim, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            self._check(other)
            out: dict[tuple[int, ...], complex] = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    k = tuple(a + b for a, b in zip(k1, k2))
                    out[k] = out.get(k, 0j) + c1 * c2
            return LaurentPoly(self.dim, out)
        return LaurentPoly(self.dim, {k: c * other for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __call__(self, point) -> complex:
        return eval_poly(self, point)

    def _check(self, other: "LaurentPoly"):
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of ``Y_t - sum_R phi_n Y_{t-n} = Z_t + sum_S theta_n Z_{t-n}``.

    ``phi`` and ``theta`` map multi-indices (tuples) to complex coefficients.
    """

    dim: int
    phi: Mapping[tuple[int, ...], complex] = field(default_factory=dict)
    theta: Mapping[tuple[int, ...], complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        for name in ("phi", "theta"):
            raw = getattr(self, name)
            clean = {}
            for key, value in raw.items():
                k = _as_index(key, self.dim)
                if not any(k):
                    raise ValueError(f"the origin is not allowed in the index set of {name}")
                if k in clean:
                    raise ValueError(f"duplicate index {k} in {name}")
                clean[k] = complex(value)
            object.__setattr__(self, name, dict(sorted(clean.items())))

    @property
    def R(self) -> list[tuple[int, ...]]:
        return list(self.phi)

    @property
    def S(self) -> list[tuple[int, ...]]:
        return list(self.theta)

    @property
    def is_causal_mode(self) -> bool:
        """Index sets lie in the nonnegative orthant (required by causal checks)."""
        return all(min(k) >= 0 for k in list(self.phi) + list(self.theta))

    @property
    def is_pure_ma(self) -> bool:
        return not any(c != 0 for c in self.phi.values())

    def max_shift(self) -> tuple[np.ndarray, np.ndarray]:
        """Largest positive and negative lags per axis over R and S."""
        keys = [np.asarray(k) for k in list(self.phi) + list(self.theta)]
        if not keys:
            z = np.zeros(self.dim, dtype=np.int64)
            return z, z.copy()
        arr = np.array(keys, dtype=np.int64)
        return np.maximum(arr.max(axis=0), 0), np.maximum(-arr.min(axis=0), 0)

    def transposed(self, perm: Sequence[int]) -> "ModelSpec":
        """The same model with coordinates permuted by ``perm``."""
        def move(m):
            return {tuple(k[p] for p in perm): c for k, c in m.items()}
        return ModelSpec(self.dim, move(self.phi), move(self.theta))


def arma_polys(model: ModelSpec) -> tuple[LaurentPoly, LaurentPoly]:
    """Return the autoregressive and moving-average polynomials ``(Phi, Theta)``."""
    one = (0,) * model.dim
    phi = {one: 1.0}
    phi.update({k: -c for k, c in model.phi.items()})
    theta = {one: 1.0}
    theta.update(model.theta)
    return LaurentPoly(model.dim, phi), LaurentPoly(model.dim, theta)


def first_order_model(phi1: float, phi2: float, phi3: float) -> ModelSpec:
    """The first-order planar AR model with lags (1,0), (0,1), (1,1)."""
    terms = {(1, 0): phi1, (0, 1): phi2, (1, 1): phi3}
    return ModelSpec(2, {k: v for k, v in terms.items() if v != 0})


def eval_poly(p: LaurentPoly, point) -> complex:
    """Exact evaluation ``sum_n c_n point**n``."""
    z = np.asarray(point, dtype=complex).reshape(-1)
    if z.size != p.dim:
        raise DimensionError(f"point has length {z.size}, expected {p.dim}")
    total = 0j
    for k, c in p.terms.items():
        term = c
        for zi, ki in zip(z, k):
            if ki < 0 and zi == 0:
                raise ZeroDivisionError("zero coordinate raised to a negative power")
            if ki:
                term *= zi**ki
        total += term
    return complex(total)


def eval_torus_grid(p: LaurentPoly, resolution) -> np.ndarray:
    """Sample ``p(exp(-i t))`` on the uniform grid ``t_j = 2 pi j / M``.

    The coefficients are wrapped into an array of the grid shape and a forward
    multidimensional DFT is applied, so ``A[j] = sum_n c_n exp(-2 pi i n.j/M)``.
    """
    res = _resolution(resolution, p.dim)
    arr = np.zeros(res, dtype=complex)
    for k, c in p.terms.items():
        idx = tuple(int(ki) % m for ki, m in zip(k, res))
        arr[idx] += c
    return sp_fft.fftn(arr, workers=worker_count())


def _resolution(resolution, dim: int) -> tuple[int, ...]:
    if np.isscalar(resolution):
        res = (int(resolution),) * dim
    else:
        res = tuple(int(m) for m in resolution)
    if len(res) != dim:
        raise DimensionError(f"resolution has {len(res)} axes, expected {dim}")
    if any(m < 1 for m in res):
        raise ValueError("resolution must be at least 1 on every axis")
    return res


def _pairs(values) -> list[complex]:
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"coefficient {v!r} is not a [re, im] pair")
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(float(v)))
    return out


def model_from_json(text: str) -> ModelSpec:
    """Parse ``{"d", "R", "phi", "S", "theta"}`` with positional correspondence."""
    data = json.loads(text)
    if not isinstance(data, dict) or "d" not in data:
        raise ValueError("model JSON must be an object with key 'd'")
    d = int(data["d"])
    R = data.get("R", [])
    S = data.get("S", [])
    phi = _pairs(data.get("phi", []))
    theta = _pairs(data.get("theta", []))
    if len(R) != len(phi) or len(S) != len(theta):
        raise ValueError("index lists and coefficient lists differ in length")
    for k in list(R) + list(S):
        if len(k) != d:
            raise DimensionError(f"index {k} does not have length d={d}")
    return ModelSpec(d, {tuple(k): c for k, c in zip(R, phi)},
                     {tuple(k): c for k, c in zip(S, theta)})


def model_to_json(model: ModelSpec) -> str:
    return json.dumps({
        "d": model.dim,
        "R": [list(k) for k in model.phi],
        "phi": [[c.real, c.imag] for c in model.phi.values()],
        "S": [list(k) for k in model.theta],
        "theta": [[c.real, c.imag] for c in model.theta.values()],
    })
