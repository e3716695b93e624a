"""Seeded noise fields, truncated linear solutions and convergence diagnostics.

Noise is counter based: the value at a lattice site is a pure function of
``(seed, site)``, so windows can be moved, tiled or regenerated without
changing values on their overlap.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .noise import NoiseSpec
from .polycore import ModelSpec
from .spectral import CoefficientField, DecayFit, decay_fit

__all__ = [
    "LatticeWindow",
    "FieldSample",
    "TruncationError",
    "counter_uniforms",
    "sample_noise",
    "linear_field",
    "ResidualReport",
    "arma_residual",
    "TailBound",
    "residual_tail_bound",
    "nonunique_perturbation",
    "RectangularReport",
    "rectangular_partial_sums",
    "klesov_field",
    "klesov_square_sums",
    "klesov_path_sums",
    "ThreeSeriesReport",
    "three_series_report",
]

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


class TruncationError(ValueError):
    """The requested truncation does not fit inside the coefficient box."""


@dataclass(frozen=True)
class LatticeWindow:
    """The box ``lower <= t <= upper`` (inclusive) in Z^d."""

    lower: tuple[int, ...]
    upper: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lower)
        hi = tuple(int(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise ValueError("window bounds must have the same positive length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("window needs lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def box(cls, shape: Sequence[int], origin: Optional[Sequence[int]] = None):
        origin = (0,) * len(shape) if origin is None else tuple(origin)
        return cls(origin, tuple(o + int(s) - 1 for o, s in zip(origin, shape)))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lower, self.upper))

    def grids(self) -> list[np.ndarray]:
        return np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(self.lower, self.upper)],
                           indexing="ij")

    def contains(self, other: "LatticeWindow") -> bool:
        return all(a <= c and d <= b for a, b, c, d in
                   zip(self.lower, self.upper, other.lower, other.upper))

    def shrink(self, lo, hi) -> Optional["LatticeWindow"]:
        lower = tuple(a + int(s) for a, s in zip(self.lower, lo))
        upper = tuple(b - int(s) for b, s in zip(self.upper, hi))
        if any(a > b for a, b in zip(lower, upper)):
            return None
        return LatticeWindow(lower, upper)

    def slices_in(self, outer: "LatticeWindow") -> tuple[slice, ...]:
        """Index of this window inside the array of ``outer``."""
        return tuple(slice(a - o, b - o + 1) for a, b, o in
                     zip(self.lower, self.upper, outer.lower))


@dataclass
class FieldSample:
    window: LatticeWindow
    values: np.ndarray
    seed: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.window.shape:
            raise ValueError("values do not match the window shape")
        self.values.flags.writeable = False

    def on(self, sub: LatticeWindow) -> np.ndarray:
        if not self.window.contains(sub):
            raise ValueError("requested window is not inside the sample")
        return self.values[sub.slices_in(self.window)]

    def to_csv(self) -> str:
        """Rows ``t_1,...,t_d,re,im`` in lexicographic site order."""
        buf = io.StringIO()
        cols = [g.ravel() for g in self.window.grids()]
        v = self.values.ravel()
        for i in range(v.size):
            idx = ",".join(str(int(c[i])) for c in cols)
            buf.write(f"{idx},{v[i].real:.17g},{v[i].imag:.17g}\n")
        return buf.getvalue()

    def to_pgm(self) -> bytes:
        """8-bit binary PGM of ``|values|`` scaled by the maximum (2D only)."""
        if self.window.dim != 2:
            raise ValueError("PGM export needs a two-dimensional window")
        mag = np.abs(self.values)
        top = mag.max()
        img = np.zeros(mag.shape, dtype=np.uint8) if top == 0 else \
            np.clip(np.floor(255.0 * mag / top), 0, 255).astype(np.uint8)
        h, w = img.shape
        return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes(order="C")


# ---------------------------------------------------------------------------
# counter-based noise

def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def counter_uniforms(seed: int, coords: Sequence[np.ndarray], stream: int) -> np.ndarray:
    """Uniforms on (0, 1] that depend only on (seed, stream, site)."""
    with np.errstate(over="ignore"):
        h = _mix(np.full(np.shape(coords[0]), np.uint64(seed % 2**64)) + np.uint64(stream) * _GOLDEN)
        for i, c in enumerate(coords):
            ci = np.asarray(c, dtype=np.int64).view(np.uint64)
            h = _mix(h ^ (ci * _GOLDEN + np.uint64(i + 1)))
    return ((h >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def sample_noise(noise: NoiseSpec, window: LatticeWindow, seed: int) -> FieldSample:
    coords = window.grids()
    u1 = counter_uniforms(seed, coords, 0)
    u2 = counter_uniforms(seed, coords, 1)
    vals = noise.from_uniforms(u1, u2)
    return FieldSample(window, vals, seed, {"kind": "noise", "noise": noise.describe()})


# ---------------------------------------------------------------------------
# truncated linear fields

def _truncation_box(coeffs: CoefficientField, N) -> tuple[np.ndarray, np.ndarray]:
    d = coeffs.dim
    N = np.broadcast_to(np.asarray(N, dtype=np.int64), (d,))
    if np.any(N < 0):
        raise ValueError("truncation must be nonnegative")
    lo = np.zeros(d, dtype=np.int64) if coeffs.support_kind == "causal-orthant" else -N
    hi = N.copy()
    have_lo, have_hi = np.asarray(coeffs.lower), np.asarray(coeffs.upper)
    if coeffs.support_kind == "causal-orthant":
        lo = np.maximum(lo, have_lo)
    if np.any(have_hi < hi) or np.any(have_lo > lo):
        raise TruncationError(f"truncation {tuple(int(v) for v in N)} exceeds the coefficient "
                              f"box {tuple(coeffs.lower)}..{tuple(coeffs.upper)}")
    return lo, hi


def linear_field(coeffs: CoefficientField, noise: NoiseSpec, window: LatticeWindow,
                 N, seed: int) -> FieldSample:
    """``Y_t = sum_{k in box(N)} psi_k Z_{t-k}`` on ``window``.

    ``box(N)`` is ``[0, N]^d`` for causal fields and ``[-N, N]^d`` otherwise.
    Shifts are accumulated in lexicographic order of ``k``.
    """
    if coeffs.dim != window.dim:
        raise ValueError("coefficient and window dimensions differ")
    lo, hi = _truncation_box(coeffs, N)
    zwin = LatticeWindow(tuple(np.asarray(window.lower) - hi), tuple(np.asarray(window.upper) - lo))
    Z = sample_noise(noise, zwin, seed).values
    Y = np.zeros(window.shape, dtype=complex)
    sub = coeffs.values[tuple(slice(a - b, c - b + 1) for a, c, b in
                              zip(lo, hi, coeffs.lower))]
    for off in np.ndindex(*sub.shape):
        c = sub[off]
        if c == 0:
            continue
        k = np.asarray(off) + lo
        start = hi - k
        Y += c * Z[tuple(slice(s, s + n) for s, n in zip(start, window.shape))]
    prov = {"kind": "linear", "noise": noise.describe(),
            "truncation": [int(v) for v in np.broadcast_to(N, (window.dim,))]}
    return FieldSample(window, Y, seed, prov)


# ---------------------------------------------------------------------------
# residuals

@dataclass
class ResidualReport:
    max_abs: float
    interior: LatticeWindow
    values: np.ndarray

    def to_dict(self) -> dict:
        return {"max_abs": format(self.max_abs, ".17g"),
                "interior": [list(self.interior.lower), list(self.interior.upper)]}


def arma_residual(model: ModelSpec, Y: FieldSample, Z: FieldSample) -> ResidualReport:
    """``Phi(B) Y_t - Theta(B) Z_t`` on the interior of ``Y.window``.

    The interior is the window shrunk by the largest lags in R and S, so
    every shifted term is available.
    """
    if model.dim != Y.window.dim:
        raise ValueError("model and field dimensions differ")
    pos, neg = model.max_shift()
    inner = Y.window.shrink(pos, neg)
    if inner is None:
        raise ValueError("the window is too small for the model lags")
    if not Z.window.contains(Y.window):
        raise ValueError("the noise window must contain the field window")

    def shifted(sample, n):
        w = LatticeWindow(tuple(np.asarray(inner.lower) - n), tuple(np.asarray(inner.upper) - n))
        return sample.on(w)

    zero = np.zeros(model.dim, dtype=np.int64)
    r = shifted(Y, zero).copy()
    for n, c in model.phi.items():
        r -= c * shifted(Y, np.asarray(n))
    r -= shifted(Z, zero)
    for n, c in model.theta.items():
        r -= c * shifted(Z, np.asarray(n))
    return ResidualReport(float(np.max(np.abs(r))), inner, r)


@dataclass
class TailBound:
    value: float
    kind: str               # "envelope" (almost sure, on the window) or "mean-square"
    fit: Optional[DecayFit] = None

    def to_dict(self) -> dict:
        out = {"value": format(self.value, ".17g"), "kind": self.kind}
        if self.fit is not None:
            out["M"] = format(self.fit.M, ".17g")
            out["c"] = format(self.fit.c, ".17g")
        return out


def residual_tail_bound(model: ModelSpec, coeffs: CoefficientField, N,
                        noise_sup: float, noise: Optional[NoiseSpec] = None) -> TailBound:
    """Bound on the residual of the ``N``-truncated causal field.

    With ``psi`` the full coefficients and ``B`` the truncation box, the
    residual filter is ``Theta - Phi * (psi 1_B) = Phi * (psi 1_{B^c})``.  Its
    coefficients live on the layer ``(B + R) minus B`` and are bounded
    through the envelope ``M exp(-c |k|)``; the residual at any site is at
    most ``noise_sup`` times their absolute sum.

    Without an exponential envelope the Parseval tail
    ``(1 + sum |phi|) * sqrt(sum_{k not in B} |psi_k|^2 E|Z|^2)`` is
    returned, which bounds the root-mean-square residual only.
    """
    d = model.dim
    if coeffs.support_kind != "causal-orthant":
        raise ValueError("the tail bound is implemented for causal fields")
    Nv = np.broadcast_to(np.asarray(N, dtype=np.int64), (d,))
    fit = coeffs.decay if coeffs.decay is not None else decay_fit(coeffs)
    phi_abs = sum(abs(c) for c in model.phi.values())
    if fit is None:
        idx = np.indices(coeffs.values.shape)
        outside = np.zeros(coeffs.values.shape, dtype=bool)
        for a in range(d):
            outside |= idx[a] + coeffs.lower[a] > Nv[a]
        var = noise.second_moment if noise is not None else math.inf
        tail = float(np.sum(np.abs(coeffs.values[outside]) ** 2))
        return TailBound((1 + phi_abs) * math.sqrt(tail * var), "mean-square")
    pos, _ = model.max_shift()
    top = Nv + pos
    grids = np.indices(tuple(top + 1))
    l1 = grids.sum(axis=0)
    out_B = np.zeros(l1.shape, dtype=bool)
    for a in range(d):
        out_B |= grids[a] > Nv[a]
    total = fit.envelope(l1[out_B]).sum()
    for n, c in model.phi.items():
        src = grids - np.asarray(n).reshape((-1,) + (1,) * d)
        ok = np.all(src >= 0, axis=0) & np.any(src > Nv.reshape((-1,) + (1,) * d), axis=0)
        total += abs(c) * fit.envelope(src.sum(axis=0)[ok]).sum()
    return TailBound(float(noise_sup * total), "envelope", fit)


def nonunique_perturbation(Y: FieldSample, lam: Sequence[float], U: float) -> FieldSample:
    """Add ``W_t = exp(2 pi i U) exp(i t.lam)`` at every site."""
    lam = np.asarray(lam, dtype=float)
    if lam.size != Y.window.dim:
        raise ValueError("lambda must have one entry per axis")
    if not 0 <= U < 1:
        raise ValueError("U must lie in [0, 1)")
    phase = sum(g * l for g, l in zip(Y.window.grids(), lam))
    W = np.exp(2j * np.pi * U) * np.exp(1j * phase)
    prov = dict(Y.provenance)
    prov.update({"kind": "perturbed", "lambda": [float(v) for v in lam], "U": float(U)})
    return FieldSample(Y.window, Y.values + W, Y.seed, prov)


# ---------------------------------------------------------------------------
# rectangular convergence

@dataclass
class RectangularReport:
    paths: list[np.ndarray]             # visited truncation points per path
    traces: list[np.ndarray]            # partial sums along each path
    finals: np.ndarray
    spread: float                       # max pairwise distance of final values
    spread_by_level: np.ndarray         # spread over visited points with min(N) >= m

    def to_dict(self) -> dict:
        return {"finals": [[format(v.real, ".17g"), format(v.imag, ".17g")] for v in self.finals],
                "spread": format(self.spread, ".17g"),
                "spread_by_level": [format(v, ".17g") for v in self.spread_by_level]}


def _monotone_path(rng, upper: np.ndarray) -> np.ndarray:
    """Increase one random coordinate at a time until some axis is exhausted."""
    cur = np.zeros(upper.size, dtype=np.int64)
    pts = [cur.copy()]
    weights = rng.dirichlet(np.ones(upper.size))
    while np.all(cur < upper):
        a = rng.choice(upper.size, p=weights)
        cur[a] += 1
        pts.append(cur.copy())
    return np.array(pts)


def rectangular_partial_sums(coeffs: CoefficientField, noise: NoiseSpec, t: Sequence[int],
                             paths: int, seed: int,
                             explicit_paths: Optional[Sequence[np.ndarray]] = None
                             ) -> RectangularReport:
    """Partial sums ``sum_{0 <= k <= N} psi_k Z_{t-k}`` along monotone paths of N.

    All paths use the same noise realisation.  Random paths raise one
    coordinate at a time (axis preferences drawn per path) and stop when a
    coordinate reaches the coefficient box.
    """
    if coeffs.support_kind != "causal-orthant" or any(coeffs.lower):
        raise ValueError("rectangular sums need causal-orthant coefficients from the origin")
    d = coeffs.dim
    upper = np.asarray(coeffs.upper, dtype=np.int64)
    t = np.asarray(t, dtype=np.int64)
    win = LatticeWindow(tuple(t - upper), tuple(t))
    Z = sample_noise(noise, win, seed).values
    terms = coeffs.values * Z[tuple(slice(None, None, -1) for _ in range(d))]
    cum = terms
    for a in range(d):
        cum = np.cumsum(cum, axis=a)
    rng = np.random.default_rng(seed)
    plist = [_monotone_path(rng, upper) for _ in range(paths)]
    if explicit_paths is not None:
        plist += [np.asarray(p, dtype=np.int64) for p in explicit_paths]
    traces = [cum[tuple(p.T)] for p in plist]
    finals = np.array([tr[-1] for tr in traces])
    spread = float(np.max(np.abs(finals[:, None] - finals[None, :]))) if finals.size else 0.0
    levels = int(min(upper))
    by_level = np.zeros(levels + 1)
    for m in range(levels + 1):
        vals = np.concatenate([tr[p.min(axis=1) >= m] for p, tr in zip(plist, traces)])
        by_level[m] = float(np.ptp(vals.real) + np.ptp(vals.imag)) if vals.size else 0.0
    return RectangularReport(plist, traces, finals, spread, by_level)


def klesov_field(n1: int, n2: int) -> np.ndarray:
    """``X(i, j) = (-1)^j i`` for ``i >= 1`` and ``j in {1, 2}``, zero elsewhere,
    on ``{0..n1} x {0..n2}``."""
    X = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
    i = np.arange(1, n1 + 1)
    for j in (1, 2):
        if j <= n2:
            X[1:, j] = (-1) ** j * i
    return X


def klesov_square_sums(n_max: int) -> np.ndarray:
    """``sum_{i,j=1}^n X(i, j)`` for ``n = 1..n_max`` (exact integers)."""
    X = klesov_field(n_max, n_max)
    cum = X.cumsum(0).cumsum(1)
    return np.array([cum[n, n] for n in range(1, n_max + 1)])


def klesov_path_sums(path: Sequence[Sequence[int]]) -> np.ndarray:
    """Rectangular sums ``sum_{i <= N1, j <= N2} X(i, j)`` along a path of (N1, N2)."""
    path = np.asarray(path, dtype=np.int64)
    X = klesov_field(int(path[:, 0].max()), int(path[:, 1].max()))
    cum = X.cumsum(0).cumsum(1)
    return cum[path[:, 0], path[:, 1]]


# ---------------------------------------------------------------------------
# three-series diagnostics

@dataclass
class ThreeSeriesReport:
    c: float
    series: dict          # name -> {"box_sum", "tail", "verdict", "slope"}

    def verdict(self) -> str:
        vs = [s["verdict"] for s in self.series.values()]
        if "divergent" in vs:
            return "divergent"
        if all(v == "convergent" for v in vs):
            return "convergent"
        return "inconclusive"

    def to_json(self) -> str:
        def fmt(v):
            return format(v, ".17g") if isinstance(v, float) else v
        return json.dumps({"c": fmt(self.c), "verdict": self.verdict(),
                           "series": {k: {kk: fmt(vv) for kk, vv in s.items()}
                                      for k, s in self.series.items()}}, indent=2)


def _shell_sites(d: int, s: np.ndarray, kind: str) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if kind == "causal-orthant":
        # C(s + d - 1, d - 1)
        out = np.ones_like(s)
        for j in range(1, d):
            out = out * (s + j) / j
        return out
    # |{k in Z^d : |k| = s}| <= 2^d C(s + d - 1, d - 1)
    return 2.0**d * _shell_sites(d, s, "causal-orthant")


def _occupancy(coeffs: CoefficientField):
    """Number of nonzero coefficients per L1 shell, extrapolated as ``C s^g``.

    The power is fitted on the outer half of the complete shells and capped
    by the shell size, so coefficients supported on a line are not counted
    as if they filled the whole orthant.
    """
    d = coeffs.dim
    lo, hi = np.asarray(coeffs.lower), np.asarray(coeffs.upper)
    reach = hi if coeffs.support_kind == "causal-orthant" else np.minimum(hi, -lo)
    S = int(reach.min())
    counts = np.bincount(coeffs.l1_grid()[coeffs.values != 0].ravel(), minlength=S + 1)[: S + 1]
    shells = np.arange(max(S // 2, 1), S + 1)
    cnt = counts[shells]
    if S < 4 or np.any(cnt == 0):
        g, C = d - 1.0, None
    else:
        g = float(np.clip(np.polyfit(np.log(shells), np.log(cnt), 1)[0], 0.0, d - 1.0))
        C = float(np.max(cnt / shells**g))

    def occ(s):
        full = _shell_sites(d, s, coeffs.support_kind)
        return full if C is None else np.minimum(C * np.asarray(s, dtype=float) ** g, full)
    return occ


def _extrapolate(term, start: int, horizon: int, exact: int = 2000):
    """Sum ``term(s)`` over shells beyond ``start`` and judge the remainder.

    Shells up to ``start + exact`` are summed directly.  The log-log slope of
    the terms over ``[horizon/10, horizon]`` decides convergence; for a
    convergent power law the remainder is added in closed form.
    """
    s = np.arange(start + 1, start + exact + 1, dtype=float)
    vals = term(s)
    total = float(np.sum(vals))
    far = np.geomspace(max(horizon / 10, s[-1] + 1), max(horizon, 10 * (s[-1] + 1)), 24)
    fv = term(far)
    if not np.isfinite(total) or not np.all(np.isfinite(fv)):
        return math.inf, "divergent", float("nan")
    if np.all(fv == 0):
        return total, "convergent", float("-inf")
    sel = fv > 0
    if sel.sum() < 3:
        return total, "convergent", float("-inf")
    slope = float(np.polyfit(np.log(far[sel]), np.log(fv[sel]), 1)[0])
    if slope < -1.05:
        top = vals[-1]
        return total + float(top * s[-1] / (-slope - 1)), "convergent", slope
    if slope > -0.95:
        return math.inf, "divergent", slope
    return total, "inconclusive", slope


def three_series_report(coeffs: CoefficientField, noise: NoiseSpec, c: float = 1.0,
                        horizon: int = 10**6) -> ThreeSeriesReport:
    """Series (A) ``sum P(|psi_k Z| >= c)`` and (C) ``sum Var(psi_k Z 1{|psi_k Z| < c})``.

    The box part uses the exact tail and truncated-moment functions of the
    noise (the truncated mean vanishes for symmetric laws).  Beyond the box
    each shell is evaluated at the decay envelope with exact shell sizes,
    and the log-log slope of these terms far out decides convergence.
    Without an envelope both series are inconclusive.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if not noise.symmetric:
        raise ValueError("series (B) is not implemented, so the noise must be symmetric")
    mag = np.abs(coeffs.values).ravel()
    mag = mag[mag > 0]
    y = math.log(c) - np.log(mag)
    a_box = float(np.sum(noise.log_tail(y, inclusive=True)))
    c_box = float(c * c * np.sum(noise.scaled_truncated_m2(y)))

    fit = coeffs.decay if coeffs.decay is not None else decay_fit(coeffs)
    series = {}
    if fit is None or math.isinf(fit.c):
        done = fit is not None
        for name, box in (("A", a_box), ("C", c_box)):
            series[name] = {"box_sum": box, "tail": 0.0 if done else None,
                            "verdict": "convergent" if done else "inconclusive", "slope": None}
        return ThreeSeriesReport(float(c), series)
    d = coeffs.dim
    start = int(coeffs.l1_grid().max())
    occupancy = _occupancy(coeffs)

    def y_env(s):
        # log(c / envelope(s))
        return math.log(c) - math.log(fit.M) + fit.c * s

    def term_a(s):
        return occupancy(s) * noise.log_tail(y_env(s), inclusive=True)

    def term_c(s):
        return occupancy(s) * c * c * noise.scaled_truncated_m2(y_env(s))

    for name, box, term in (("A", a_box, term_a), ("C", c_box, term_c)):
        tail, verdict, slope = _extrapolate(term, start, horizon)
        series[name] = {"box_sum": box, "tail": tail, "verdict": verdict, "slope": slope}
    return ThreeSeriesReport(float(c), series)
