"""Torus quadrature, coefficient extraction and zero searches.

Everything here works with the normalised measure ``(2 pi)^-d dt`` on the
torus, so the quadrature of ``|Theta/Phi|^2`` is directly comparable with the
sum of squared coefficients.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sp_fft
from scipy import optimize

from . import _kernels
from ._threads import worker_count
from .polycore import (DimensionError, LaurentPoly, ModelSpec, arma_polys,
                       eval_torus_grid)

__all__ = [
    "NODE_FLOOR",
    "AliasingError",
    "TorusGrid",
    "CoefficientField",
    "DecayFit",
    "SpectralClassification",
    "TorusZeroReport",
    "PolydiscReport",
    "l2_spectral_sequence",
    "classify_estimates",
    "quadrature_mean",
    "fourier_psi",
    "causal_alpha",
    "h2_partial_norms",
    "h2_shell_increments",
    "h2_verdict",
    "zero_search_torus",
    "zero_free_closed_polydisc",
    "decay_fit",
    "default_levels",
]

NODE_FLOOR = 1e-13
# relative size below which a refinement increment counts as converged
INCREMENT_FLOOR = 1e-12
# fraction of skipped nodes that makes a level untrustworthy
SKIP_FRACTION = 1e-3


class AliasingError(ValueError):
    """Raised when a grid transform would alias an unbounded quotient."""


@dataclass(frozen=True)
class TorusGrid:
    dim: int
    resolution: tuple[int, ...]

    def __post_init__(self):
        res = tuple(int(m) for m in np.broadcast_to(self.resolution, (self.dim,)))
        if any(m < 2 for m in res):
            raise ValueError("torus grids need at least 2 nodes per axis")
        object.__setattr__(self, "resolution", res)

    @classmethod
    def uniform(cls, dim: int, m: int) -> "TorusGrid":
        return cls(dim, (m,) * dim)

    def refine(self) -> "TorusGrid":
        return TorusGrid(self.dim, tuple(2 * m for m in self.resolution))

    @property
    def size(self) -> int:
        return int(np.prod(self.resolution))

    def nodes(self, axis: int) -> np.ndarray:
        m = self.resolution[axis]
        return 2 * np.pi * np.arange(m) / m


@dataclass(frozen=True)
class DecayFit:
    """Exponential envelope ``|c_k| <= M exp(-c |k|)`` in the L1 norm."""

    M: float
    c: float

    def envelope(self, l1):
        l1 = np.asarray(l1, dtype=float)
        if np.isinf(self.c):
            return np.where(l1 == 0, self.M, 0.0)
        return self.M * np.exp(-self.c * l1)


@dataclass
class CoefficientField:
    """Coefficients on a rectangular box of Z^d.

    ``values[i]`` is the coefficient at multi-index ``lower + i``.
    ``support_kind`` is ``"causal-orthant"`` for power-series coefficients
    and ``"full-lattice"`` for Fourier coefficients.
    """

    values: np.ndarray
    lower: tuple[int, ...]
    support_kind: str = "full-lattice"
    decay: Optional[DecayFit] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        self.lower = tuple(int(v) for v in self.lower)
        if len(self.lower) != self.values.ndim:
            raise DimensionError("offset length does not match the array rank")
        if self.support_kind not in ("full-lattice", "causal-orthant"):
            raise ValueError(f"unknown support kind {self.support_kind!r}")
        if self.support_kind == "causal-orthant" and min(self.lower) < 0:
            raise ValueError("causal-orthant fields must live in N_0^d")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def upper(self) -> tuple[int, ...]:
        return tuple(lo + n - 1 for lo, n in zip(self.lower, self.values.shape))

    @classmethod
    def delta(cls, dim: int, value: complex = 1.0, kind: str = "causal-orthant"):
        return cls(np.full((1,) * dim, value, dtype=complex), (0,) * dim, kind)

    @classmethod
    def from_dict(cls, coeffs: dict, kind: str = "full-lattice") -> "CoefficientField":
        keys = np.array(list(coeffs), dtype=np.int64)
        lo = keys.min(axis=0)
        arr = np.zeros(tuple(keys.max(axis=0) - lo + 1), dtype=complex)
        for k, v in coeffs.items():
            arr[tuple(np.asarray(k) - lo)] = v
        return cls(arr, tuple(lo), kind)

    @property
    def coeffs(self) -> dict[tuple[int, ...], complex]:
        out = {}
        for idx in zip(*np.nonzero(self.values)):
            k = tuple(int(i) + lo for i, lo in zip(idx, self.lower))
            out[k] = complex(self.values[idx])
        return out

    def get(self, k: Sequence[int]) -> complex:
        idx = tuple(int(ki) - lo for ki, lo in zip(k, self.lower))
        if any(i < 0 or i >= n for i, n in zip(idx, self.values.shape)):
            return 0j
        return complex(self.values[idx])

    def l1_grid(self) -> np.ndarray:
        """L1 norm of the multi-index at every array position."""
        axes = [np.abs(np.arange(n) + lo) for n, lo in zip(self.values.shape, self.lower)]
        grids = np.meshgrid(*axes, indexing="ij")
        return sum(grids)

    def restrict(self, lower: Sequence[int], upper: Sequence[int]) -> "CoefficientField":
        """Sub-box ``[lower, upper]``; must lie inside the stored box."""
        sl = []
        for lo, hi, own_lo, n in zip(lower, upper, self.lower, self.values.shape):
            a, b = lo - own_lo, hi - own_lo + 1
            if a < 0 or b > n:
                raise ValueError("requested box is not contained in the field")
            sl.append(slice(a, b))
        kind = self.support_kind
        if kind == "full-lattice" and min(lower) >= 0:
            kind = "causal-orthant"
        return CoefficientField(self.values[tuple(sl)].copy(), tuple(lower), kind, self.decay)

    def to_csv(self) -> str:
        """Rows ``k_1,...,k_d,re,im`` in lexicographic order of k."""
        lines = []
        for idx in np.ndindex(self.values.shape):
            v = self.values[idx]
            k = [str(i + lo) for i, lo in zip(idx, self.lower)]
            lines.append(",".join(k + [_fmt(v.real), _fmt(v.imag)]))
        return "\n".join(lines) + "\n"

    def decay_json(self) -> str:
        if self.decay is None:
            return json.dumps({"decay_fit": None})
        return json.dumps({"decay_fit": {"M": _fmt(self.decay.M), "c": _fmt(self.decay.c)}})


def _fmt(x: float) -> str:
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{float(x):.17g}"


@dataclass
class SpectralClassification:
    verdict: str
    value: Optional[float]
    estimates: list[float]
    increments: list[float]
    ratios: list[float]
    resolutions: list[int]
    skipped_fraction: list[float] = field(default_factory=list)
    diagnostic: str = ""

    def to_json(self) -> str:
        return json.dumps({
            "verdict": self.verdict,
            "value": None if self.value is None else _fmt(self.value),
            "estimates": [_fmt(v) for v in self.estimates],
            "ratios": [_fmt(v) for v in self.ratios],
            "resolutions": self.resolutions,
            "diagnostic": self.diagnostic,
        })


def default_levels(dim: int) -> tuple[int, int]:
    """Base resolution and number of doublings used when none are given."""
    if dim <= 3:
        return 32, 4
    return 16, 2


def _axis_matrix(m: int, lo: int, k: int) -> np.ndarray:
    n = lo + np.arange(k)
    return np.exp(-2j * np.pi * np.outer(np.arange(m), n) / m)


def _tile_coefficients(coef: np.ndarray, lo: np.ndarray, m: int, first: int):
    """Coefficients of the last variable on the middle-axis grid for one tile.

    The first axis is fixed at node ``first``; the result has shape
    ``(m**(d-2), K_d)``.
    """
    d = coef.ndim
    if d == 1:
        return coef.reshape(1, -1)
    v0 = _axis_matrix(m, lo[0], coef.shape[0])[first]
    a = np.tensordot(v0, coef, axes=([0], [0]))
    for ax in range(d - 2):
        V = _axis_matrix(m, lo[ax + 1], a.shape[ax])
        a = np.moveaxis(np.tensordot(V, a, axes=([1], [ax])), 0, ax)
    return np.ascontiguousarray(a.reshape(-1, coef.shape[-1]))


def quadrature_mean(num: LaurentPoly, den: LaurentPoly, m: int,
                    floor: float = NODE_FLOOR) -> tuple[float, float, float]:
    """Normalised Riemann sum of ``|num/den|^2`` on the uniform ``m^d`` grid.

    Nodes with ``|den| < floor`` contribute zero.  The grid is processed in
    slabs along the first axis, so memory stays at ``m^(d-1)``.

    Returns (mean, skipped fraction, minimum |den| on the grid).
    """
    if num.dim != den.dim:
        raise DimensionError("numerator and denominator dimensions differ")
    d = den.dim
    lo_n, hi_n = num.support_box()
    lo_d, hi_d = den.support_box()
    lo, hi = np.minimum(lo_n, lo_d), np.maximum(hi_n, hi_d)
    cn, _ = num.dense(lo, hi)
    cd, _ = den.dense(lo, hi)
    W = _axis_matrix(m, lo[-1], cd.shape[-1])
    tiles = m if d > 1 else 1
    total = 0.0
    skipped = 0
    min_den = np.inf
    for i in range(tiles):
        an = _tile_coefficients(cn, lo, m, i)
        ad = _tile_coefficients(cd, lo, m, i)
        s, k, md = _kernels.quotient_sq_sum(an, ad, W, floor * floor)
        total += s
        skipped += k
        min_den = min(min_den, md)
    n = float(m) ** d
    return total / n, skipped / n, float(np.sqrt(min_den))


def classify_estimates(estimates: Sequence[float]):
    """Finite / Divergent / Inconclusive from a refinement sequence.

    Uses up to the last three increments.  Finite: each increment is at most
    half the previous one (increments below ``1e-12`` relative count as
    converged).  Divergent: positive increments each at least 0.9 times the
    previous one.
    """
    est = np.asarray(estimates, dtype=float)
    inc = np.diff(est)
    ratios = [float(inc[i + 1] / inc[i]) if inc[i] != 0 else float("inf")
              for i in range(len(inc) - 1)]
    if len(inc) < 2:
        return "Inconclusive", inc, ratios
    tail = inc[-3:]
    scale = max(abs(est[-1]), 1.0)
    tiny = np.abs(tail) <= INCREMENT_FLOOR * scale
    finite = all(tiny[i + 1] or (not tiny[i] and abs(tail[i + 1]) <= 0.5 * abs(tail[i]))
                 for i in range(len(tail) - 1))
    if finite:
        return "Finite", inc, ratios
    divergent = all(tail > 0) and all(tail[i + 1] >= 0.9 * tail[i]
                                      for i in range(len(tail) - 1))
    if divergent:
        return "Divergent", inc, ratios
    return "Inconclusive", inc, ratios


def l2_spectral_sequence(model: ModelSpec, levels: Optional[int] = None,
                         base: Optional[int] = None) -> SpectralClassification:
    """Refinement sequence of the torus quadrature of ``|Theta/Phi|^2``.

    ``levels`` is the number of doublings after the base resolution, so
    ``levels + 1`` estimates are produced.
    """
    phi, theta = arma_polys(model)
    dflt_base, dflt_levels = default_levels(model.dim)
    base = dflt_base if base is None else int(base)
    levels = dflt_levels if levels is None else int(levels)
    if levels < 2:
        raise ValueError("at least two refinement levels are needed")
    if phi.is_zero():
        raise ValueError("the autoregressive polynomial vanishes identically")
    estimates, skipped, resolutions = [], [], []
    m = base
    for _ in range(levels + 1):
        mean, frac, _ = quadrature_mean(theta, phi, m)
        estimates.append(mean)
        skipped.append(frac)
        resolutions.append(m)
        m *= 2
    verdict, inc, ratios = classify_estimates(estimates)
    diagnostic = ""
    if all(f > SKIP_FRACTION for f in skipped):
        verdict = "Inconclusive"
        diagnostic = ("the autoregressive polynomial vanishes on more than 0.1% of the "
                      "grid nodes at every level")
    value = estimates[-1] if verdict == "Finite" else None
    return SpectralClassification(verdict, value, list(map(float, estimates)),
                                  list(map(float, inc)), ratios, resolutions,
                                  skipped, diagnostic)


def _keep_bounds(keep_box, dim: int) -> np.ndarray:
    K = np.broadcast_to(np.asarray(keep_box, dtype=np.int64), (dim,)).copy()
    if np.any(K < 0):
        raise ValueError("keep box bounds must be nonnegative")
    return K


def fourier_psi(model: ModelSpec, grid: TorusGrid, keep_box) -> CoefficientField:
    """Fourier coefficients of ``Theta/Phi`` on ``|k_i| <= keep_box[i]``.

    The quotient is sampled on ``grid`` and inverted with a multidimensional
    inverse DFT; indices are unwrapped to the signed range.
    """
    if grid.dim != model.dim:
        raise DimensionError("grid and model dimensions differ")
    K = _keep_bounds(keep_box, model.dim)
    res = np.asarray(grid.resolution)
    if np.any(res < 4 * (2 * K + 1)):
        raise ValueError("grid must be at least four times the kept box on every axis")
    phi, theta = arma_polys(model)
    den = eval_torus_grid(phi, grid.resolution)
    if np.min(np.abs(den)) < NODE_FLOOR:
        raise AliasingError("the autoregressive polynomial vanishes on a grid node")
    num = eval_torus_grid(theta, grid.resolution)
    full = sp_fft.ifftn(num / den, workers=worker_count())
    idx = np.ix_(*[np.arange(-k, k + 1) % m for k, m in zip(K, res)])
    out = CoefficientField(full[idx], tuple(-K), "full-lattice")
    out.decay = decay_fit(out)
    if out.decay is None:
        warnings.warn("no exponential envelope fits the coefficients; aliasing is not controlled",
                      RuntimeWarning, stacklevel=2)
    return out


def causal_alpha(model: ModelSpec, box, traversal: str = "lex") -> CoefficientField:
    """Power-series coefficients of ``Theta/Phi`` on ``{0..N_1} x ... x {0..N_d}``.

    ``alpha_0 = 1`` and ``alpha_k = theta_k + sum_{n in R, n <= k} phi_n alpha_{k-n}``.
    The lag sum always runs over R in sorted order, so the result does not
    depend on ``traversal`` ("lex" or "revlex") bit for bit.
    """
    if not model.is_causal_mode:
        raise ValueError("causal recursion needs R and S inside the nonnegative orthant")
    N = np.broadcast_to(np.asarray(box, dtype=np.int64), (model.dim,))
    if np.any(N < 0):
        raise ValueError("box bounds must be nonnegative")
    shape = tuple(int(n) + 1 for n in N)
    rhs = np.zeros(shape, dtype=complex)
    rhs[(0,) * model.dim] = 1.0
    for k, c in model.theta.items():
        if all(ki < s for ki, s in zip(k, shape)):
            rhs[k] += c
    order = list(range(model.dim))
    if traversal == "revlex":
        order = order[::-1]
    elif traversal != "lex":
        raise ValueError(f"unknown traversal {traversal!r}")
    r_idx = [k for k, c in model.phi.items() if c != 0]
    r_coef = [model.phi[k] for k in r_idx]
    values = _kernels.alpha_fill(
        np.array(shape, dtype=np.int64), np.array(order, dtype=np.int64),
        np.array(r_idx, dtype=np.int64).reshape(-1, model.dim),
        np.array(r_coef, dtype=complex), rhs.ravel()).reshape(shape)
    return CoefficientField(values, (0,) * model.dim, "causal-orthant")


def h2_shell_increments(c: CoefficientField) -> np.ndarray:
    """``sum_{|k| = s} |c_k|^2`` for every shell that is complete in the box."""
    if c.support_kind != "causal-orthant":
        raise ValueError("H2 norms are defined for causal-orthant fields")
    complete = min(c.upper) if c.values.size else 0
    l1 = c.l1_grid().ravel()
    sq = np.abs(c.values.ravel()) ** 2
    inc = np.bincount(l1, weights=sq, minlength=complete + 1)
    return inc[: complete + 1]


def h2_partial_norms(c: CoefficientField, shells: int) -> np.ndarray:
    """Partial sums of ``|c_k|^2`` over the L1 balls ``|k| <= s``, s = 0..shells."""
    if c.support_kind != "causal-orthant":
        raise ValueError("H2 norms are defined for causal-orthant fields")
    l1 = c.l1_grid().ravel()
    sq = np.abs(c.values.ravel()) ** 2
    inc = np.bincount(l1, weights=sq, minlength=shells + 1)[: shells + 1]
    return np.cumsum(inc)


def h2_verdict(c: CoefficientField) -> tuple[str, float]:
    """Judge square summability from the decay of complete shell increments.

    Fits ``log inc_s`` against ``log s`` over the upper half of the complete
    shells.  Slopes above -0.8 read as divergent (shell sums decaying no
    faster than ``1/s``), slopes below -1.3 as finite.  Returns (verdict, slope).
    """
    inc = h2_shell_increments(c)
    S = len(inc) - 1
    if S < 4:
        return "Inconclusive", float("nan")
    tail = np.arange(max(S // 2, 1), S + 1)
    vals = inc[tail]
    scale = inc.max()
    if np.all(vals <= 1e-28 * scale):
        return "Finite", float("-inf")
    keep = vals > 1e-28 * scale
    if keep.sum() < 3:
        return "Inconclusive", float("nan")
    slope = np.polyfit(np.log(tail[keep]), np.log(vals[keep]), 1)[0]
    if slope >= -0.8:
        return "Divergent", float(slope)
    if slope <= -1.3:
        return "Finite", float(slope)
    return "Inconclusive", float(slope)


@dataclass
class TorusZeroReport:
    zeros: list[np.ndarray]
    min_modulus: float
    argmin: np.ndarray
    resolution: int

    @property
    def found(self) -> bool:
        return bool(self.zeros)


def _coarse_resolution(dim: int) -> int:
    return int(min(256, 2 ** (20 // dim)))


def _wrap(t):
    return (np.asarray(t) + np.pi) % (2 * np.pi) - np.pi


def _torus_modulus(p: LaurentPoly):
    keys = np.array(list(p.terms), dtype=float)
    coefs = np.array(list(p.terms.values()), dtype=complex)

    def f(t):
        return float(abs(np.sum(coefs * np.exp(-1j * (keys @ np.asarray(t))))))
    return f


def zero_search_torus(p: LaurentPoly, tol: float = 1e-8,
                      resolution: Optional[int] = None,
                      max_candidates: int = 64) -> TorusZeroReport:
    """Coarse-to-fine minimisation of ``|p(exp(-i t))|`` over the torus.

    A coarse grid is scanned for local minima that could hide a zero (by the
    Lipschitz bound of p), and each candidate is refined with Nelder-Mead.
    Returned zeros satisfy ``|p| <= tol``; an empty list only means nothing
    was found at this resolution.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = p.dim
    m = resolution or _coarse_resolution(d)
    if p.is_zero():
        return TorusZeroReport([np.zeros(d)], 0.0, np.zeros(d), m)
    vals = np.abs(eval_torus_grid(p, m))
    h = 2 * np.pi / m
    best = np.unravel_index(np.argmin(vals), vals.shape)
    min_mod = float(vals[best])
    argmin = _wrap(np.array(best) * h)
    if len(p) == 1:
        return TorusZeroReport([], min_mod, argmin, m)
    local = np.ones(vals.shape, dtype=bool)
    for ax in range(d):
        local &= vals <= np.roll(vals, 1, axis=ax)
        local &= vals <= np.roll(vals, -1, axis=ax)
    lip = sum(abs(c) * np.linalg.norm(k) for k, c in p.terms.items())
    local &= vals <= lip * h * np.sqrt(d)
    cand = np.argwhere(local)
    cand = cand[np.argsort(vals[local])][:max_candidates]
    f = _torus_modulus(p)
    zeros: list[np.ndarray] = []
    for node in cand:
        t0 = node * h
        simplex = np.vstack([t0] + [t0 + 0.5 * h * e for e in np.eye(d)])
        res = optimize.minimize(f, t0, method="Nelder-Mead",
                                options={"initial_simplex": simplex, "xatol": 1e-14,
                                         "fatol": 1e-16, "maxiter": 4000 * d})
        t = _wrap(res.x)
        val = f(t)
        if val < min_mod:
            min_mod, argmin = val, t
        if val <= tol:
            dist = [np.max(np.abs(_wrap(t - z))) for z in zeros]
            if not dist or min(dist) > 0.5 * h:
                zeros.append(t)
    return TorusZeroReport(zeros, min_mod, argmin, m)


@dataclass
class PolydiscReport:
    kind: str
    min_modulus: Optional[float] = None
    point: Optional[np.ndarray] = None

    @property
    def zero_free(self) -> bool:
        return self.kind == "ZeroFreeLikely"


def _root_axis(p: LaurentPoly) -> int:
    lo, hi = p.support_box()
    return int(np.argmax(hi))


def _last_variable_coefficients(p: LaurentPoly, axis: int, zs: np.ndarray) -> np.ndarray:
    """Coefficients (degree ascending) of p in ``z_axis`` at sample points ``zs``.

    ``zs`` has shape (n, d-1) holding the other coordinates in order.
    """
    deg = max(k[axis] for k in p.terms)
    out = np.zeros((zs.shape[0], deg + 1), dtype=complex)
    for k, c in p.terms.items():
        rest = [ki for i, ki in enumerate(k) if i != axis]
        mono = np.full(zs.shape[0], c, dtype=complex)
        for j, e in enumerate(rest):
            if e:
                mono = mono * zs[:, j] ** e
        out[:, k[axis]] += mono
    return out


def _min_root_modulus(coefs: np.ndarray, scale: float) -> np.ndarray:
    """Smallest root modulus per row; 0 if the row vanishes, inf if constant."""
    n, D1 = coefs.shape
    out = np.full(n, np.inf)
    tiny = 1e-14 * max(scale, 1.0)
    lead_ok = np.abs(coefs[:, -1]) > tiny
    if D1 == 2:
        r = -coefs[lead_ok, 0] / coefs[lead_ok, 1]
        out[lead_ok] = np.abs(r)
    elif D1 > 2 and lead_ok.any():
        c = coefs[lead_ok]
        comp = np.zeros((c.shape[0], D1 - 1, D1 - 1), dtype=complex)
        comp[:, 0, :] = -c[:, -2::-1] / c[:, -1:]
        comp[:, np.arange(1, D1 - 1), np.arange(D1 - 2)] = 1.0
        out[lead_ok] = np.abs(np.linalg.eigvals(comp)).min(axis=1)
    for i in np.nonzero(~lead_ok)[0]:
        row = coefs[i]
        nz = np.nonzero(np.abs(row) > tiny)[0]
        if nz.size == 0:
            out[i] = 0.0
        elif nz.max() == 0:
            out[i] = np.inf
        else:
            roots = np.roots(row[: nz.max() + 1][::-1])
            out[i] = np.abs(roots).min()
    return out


def zero_free_closed_polydisc(p: LaurentPoly, tol: float = 1e-10, angles: Optional[int] = None,
                              random_samples: int = 2000, seed: int = 0) -> PolydiscReport:
    """Search the closed unit polydisc for a zero of the polynomial ``p``.

    The variable of highest degree is solved exactly for sampled values of
    the others (scaled tori at radii 1, 0.95, ..., 0 plus random interior
    points); the best samples are refined by local minimisation of the
    smallest root modulus.  Only ``ZeroFound`` is a certificate.  For
    ``ZeroFreeLikely`` the reported minimum modulus is the minimum over the
    torus, which bounds the polydisc from below when no zero exists.
    """
    if not p.is_polynomial():
        raise ValueError("closed polydisc search needs nonnegative exponents")
    d = p.dim
    if p.is_zero():
        return PolydiscReport("ZeroFound", 0.0, np.zeros(d, dtype=complex))
    lo, hi = p.support_box()
    if not np.any(hi):
        return PolydiscReport("ZeroFreeLikely", abs(p.coeff((0,) * d)))
    axis = _root_axis(p)
    scale = p.scale()
    if d == 1:
        roots = np.roots(np.array([p.coeff((n,)) for n in range(hi[0], -1, -1)]))
        i = int(np.argmin(np.abs(roots)))
        if abs(roots[i]) <= 1 + tol:
            return PolydiscReport("ZeroFound", 0.0, np.array([roots[i]]))
        return PolydiscReport("ZeroFreeLikely", zero_search_torus(p).min_modulus)

    free = d - 1
    if angles is None:
        angles = max(4, int(round(4096 ** (1.0 / free))))
        angles = min(angles, 256)
    radii = np.linspace(1.0, 0.0, 21)
    om = 2 * np.pi * np.arange(angles) / angles
    ang = np.stack(np.meshgrid(*([om] * free), indexing="ij"), -1).reshape(-1, free)
    pts = [r * np.exp(1j * ang) for r in radii]
    rng = np.random.default_rng(seed)
    rr = np.sqrt(rng.random((random_samples, free)))
    pts.append(rr * np.exp(2j * np.pi * rng.random((random_samples, free))))
    zs = np.vstack(pts)
    coefs = _last_variable_coefficients(p, axis, zs)
    mins = _min_root_modulus(coefs, scale)

    def point_from(z_free, root):
        z = np.insert(np.asarray(z_free, dtype=complex), axis, root)
        return z

    def root_of(z_free):
        row = _last_variable_coefficients(p, axis, np.asarray(z_free).reshape(1, -1))[0]
        nz = np.nonzero(np.abs(row) > 1e-14 * max(scale, 1.0))[0]
        if nz.size == 0 or nz.max() == 0:
            return 0j
        roots = np.roots(row[: nz.max() + 1][::-1])
        return roots[np.argmin(np.abs(roots))]

    i = int(np.argmin(mins))
    if mins[i] <= 1 + tol:
        return PolydiscReport("ZeroFound", 0.0, point_from(zs[i], root_of(zs[i])))

    def objective(x):
        rad = np.clip(x[:free], 0.0, 1.0)
        z = rad * np.exp(1j * x[free:])
        return float(_min_root_modulus(_last_variable_coefficients(p, axis, z.reshape(1, -1)),
                                       scale)[0])

    for j in np.argsort(mins)[:10]:
        z0 = zs[j]
        x0 = np.concatenate([np.abs(z0), np.angle(z0)])
        res = optimize.minimize(objective, x0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
        if res.fun <= 1 + tol:
            rad = np.clip(res.x[:free], 0.0, 1.0)
            zf = rad * np.exp(1j * res.x[free:])
            return PolydiscReport("ZeroFound", 0.0, point_from(zf, root_of(zf)))
    return PolydiscReport("ZeroFreeLikely", zero_search_torus(p).min_modulus)


def decay_fit(c: CoefficientField, rel_floor: float = 1e-13) -> Optional[DecayFit]:
    """Exponential envelope ``|c_k| <= M exp(-c |k|)`` for a coefficient field.

    The rate is the least-squares slope of the log shell maxima over the
    outer half of the shells.  If the rate over the inner half is more than
    twice as steep the decay is treated as sub-exponential and None is
    returned.  M is the smallest constant that dominates every entry,
    inflated by 5%.
    """
    mag = np.abs(c.values)
    top = mag.max() if mag.size else 0.0
    if top == 0:
        return None
    l1 = c.l1_grid()
    keep = mag > rel_floor * top
    shells = np.unique(l1[keep])
    if shells.size == 1:
        if shells[0] != 0:
            return None
        return DecayFit(float(mag[keep].max()), float("inf"))
    smax = np.array([mag[keep & (l1 == s)].max() for s in shells])
    logm = np.log(smax)
    if shells.size < 4:
        rate = -np.polyfit(shells, logm, 1)[0]
        head = rate
    else:
        half = shells.size // 2
        rate = -np.polyfit(shells[half:], logm[half:], 1)[0]
        head = -np.polyfit(shells[: half + 1], logm[: half + 1], 1)[0]
    if not np.isfinite(rate) or rate <= 0 or rate < 0.5 * head:
        return None
    M = float(np.max(mag[keep] * np.exp(rate * l1[keep])))
    return DecayFit(1.05 * M, float(rate))
