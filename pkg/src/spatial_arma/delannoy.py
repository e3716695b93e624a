"""Weighted Delannoy numbers and the special functions used to study their decay.

``psi[n, k]`` is the weighted number of lattice paths from (0, 0) to (n, k)
with steps (1, 0), (0, 1), (1, 1) of weights phi1, phi2, phi3.  These are the
power-series coefficients of ``1 / (1 - phi1 z1 - phi2 z2 - phi3 z1 z2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy.signal import lfilter

from .spectral import CoefficientField, decay_fit

__all__ = [
    "DelannoyParams",
    "delannoy_table",
    "delannoy_field",
    "delannoy_recursive",
    "delannoy_closed_a",
    "delannoy_closed_b",
    "jacobi_poly",
    "jacobi_delannoy_identity",
    "bessel_j01",
    "asymptotic_decay_diagnostic",
    "required_box",
    "counting_function",
    "l1_sphere_count",
    "sphere_bound_constant",
]


class DelannoyParams(NamedTuple):
    phi1: float
    phi2: float
    phi3: float

    def swapped(self) -> "DelannoyParams":
        return DelannoyParams(self.phi2, self.phi1, self.phi3)


def _params(p) -> DelannoyParams:
    p = DelannoyParams(*p)
    if not all(math.isfinite(float(v)) for v in p):
        raise ValueError("weights must be finite")
    return p


def _check_nk(n: int, k: int):
    if n < 0 or k < 0:
        raise ValueError("indices must be nonnegative")


def delannoy_table(p, n: int, k: int) -> np.ndarray:
    """Dynamic-programming fill of ``psi[0..n, 0..k]``."""
    phi1, phi2, phi3 = _params(p)
    _check_nk(n, k)
    t = np.zeros((n + 1, k + 1))
    # row i solves psi[i, j] - phi2 psi[i, j-1] = phi1 psi[i-1, j] + phi3 psi[i-1, j-1]
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    den = [1.0, -phi2]
    for i in range(n + 1):
        t[i] = lfilter([1.0], den, rhs)
        rhs = phi1 * t[i]
        rhs[1:] += phi3 * t[i, :-1]
    return t


def delannoy_field(p, box: int) -> CoefficientField:
    """The Delannoy table on ``{0..box}^2`` as a causal coefficient field."""
    return CoefficientField(delannoy_table(p, box, box), (0, 0), "causal-orthant")


def delannoy_recursive(p, n: int, k: int) -> float:
    return float(delannoy_table(p, n, k)[n, k])


def _oriented(p, n: int, k: int):
    """Weights and indices in a canonical orientation, so that swapping
    ``(phi1, n)`` with ``(phi2, k)`` repeats the same floating operations."""
    phi1, phi2, phi3 = _params(p)
    _check_nk(n, k)
    if (k, phi2) < (n, phi1):
        return phi2, phi1, phi3, k, n
    return phi1, phi2, phi3, n, k


def _dyadic(x: float) -> tuple[int, int]:
    """``x = m * 2**e`` exactly, as ``(m, e)``."""
    num, den = float(x).as_integer_ratio()
    return num, -(den.bit_length() - 1)


def _dyadic_sum(terms) -> tuple[int, int]:
    """Exact sum of ``(c, e)`` pairs meaning ``c * 2**e``."""
    terms = [(c, e) for c, e in terms if c]
    if not terms:
        return 0, 0
    base = min(e for _, e in terms)
    return sum(c << (e - base) for c, e in terms), base


def _powers(m: int, top: int) -> list[int]:
    out = [1]
    for _ in range(top):
        out.append(out[-1] * m)
    return out


def _dyadic_value(m: int, e: int, exact: bool):
    if exact:
        return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)
    try:
        return float(m << e) if e >= 0 else m / (1 << -e)      # correctly rounded
    except OverflowError:
        return math.copysign(math.inf, m)


# float sums whose cancellation could cost more than this relative accuracy
# are re-evaluated exactly
_CANCEL_TOL = 1e-13


def _guarded(total: float, abs_total: float, terms: int) -> bool:
    return abs_total * terms * 2.3e-16 <= _CANCEL_TOL * abs(total)


def delannoy_closed_a(p, n: int, k: int, exact: bool = False):
    """``sum_j C(k, j) C(n+k-j, k) phi1^(n-j) phi2^(k-j) phi3^j``.

    The sum is taken in floating point with running binomials.  When the
    terms cancel so much that rounding could exceed about 1e-13 relative
    error, it is recomputed exactly from the binary values of the weights
    and rounded once.  ``exact=True`` returns that exact value as a Fraction.
    """
    phi1, phi2, phi3, n, k = _oriented(p, n, k)
    top = min(n, k)
    if not exact:
        total = abs_total = 0.0
        bk = 1.0                      # C(k, j)
        bnk = _binom(n + k, k)        # C(n + k - j, k)
        for j in range(top + 1):
            term = bk * bnk * phi1 ** (n - j) * phi2 ** (k - j) * phi3 ** j
            total += term
            abs_total += abs(term)
            bk *= (k - j) / (j + 1)
            if n + k - j > 0:
                bnk *= (n - j) / (n + k - j)
        if _guarded(total, abs_total, top + 1):
            return total
    (m1, e1), (m2, e2), (m3, e3) = (_dyadic(v) for v in (phi1, phi2, phi3))
    p1, p2, p3 = _powers(m1, n), _powers(m2, k), _powers(m3, top)
    terms = []
    ck, cnk = 1, math.comb(n + k, k)
    for j in range(top + 1):
        terms.append((ck * cnk * p1[n - j] * p2[k - j] * p3[j],
                      e1 * (n - j) + e2 * (k - j) + e3 * j))
        ck = ck * (k - j) // (j + 1)
        if n + k - j > 0:
            cnk = cnk * (n - j) // (n + k - j)
    return _dyadic_value(*_dyadic_sum(terms), exact)


def delannoy_closed_b(p, n: int, k: int, exact: bool = False):
    """``sum_j C(n, j) C(k, j) phi1^(n-j) phi2^(k-j) (phi1 phi2 + phi3)^j``.

    Evaluated like :func:`delannoy_closed_a`; the exact path forms
    ``phi1 phi2 + phi3`` without rounding.
    """
    phi1, phi2, phi3, n, k = _oriented(p, n, k)
    top = min(n, k)
    if not exact:
        g = phi1 * phi2 + phi3
        total = abs_total = 0.0
        bn = 1.0
        bk = 1.0
        for j in range(top + 1):
            term = bn * bk * phi1 ** (n - j) * phi2 ** (k - j) * g ** j
            total += term
            abs_total += abs(term)
            bn *= (n - j) / (j + 1)
            bk *= (k - j) / (j + 1)
        if _guarded(total, abs_total, top + 1):
            return total
    (m1, e1), (m2, e2), (m3, e3) = (_dyadic(v) for v in (phi1, phi2, phi3))
    mg, eg = _dyadic_sum([(m1 * m2, e1 + e2), (m3, e3)])
    p1, p2, pg = _powers(m1, n), _powers(m2, k), _powers(mg, top)
    terms = []
    cn = ck = 1
    for j in range(top + 1):
        terms.append((cn * ck * p1[n - j] * p2[k - j] * pg[j],
                      e1 * (n - j) + e2 * (k - j) + eg * j))
        cn = cn * (n - j) // (j + 1)
        ck = ck * (k - j) // (j + 1)
    return _dyadic_value(*_dyadic_sum(terms), exact)


def _binom(a: int, b: int) -> float:
    b = min(b, a - b)
    out = 1.0
    for i in range(b):
        out = out * (a - i) / (i + 1)
    return out


def jacobi_poly(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial ``P_n^(alpha, beta)(x)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if alpha <= -1 or beta <= -1:
        raise ValueError("alpha and beta must exceed -1")
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    ab = alpha + beta
    p1 = (alpha + 1) + (ab + 2) * (x - 1) / 2
    for m in range(2, n + 1):
        c = 2 * m + ab
        a1 = 2 * m * (m + ab) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * x + alpha**2 - beta**2)
        a3 = 2 * (m + alpha - 1) * (m + beta - 1) * c
        p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
    return p1 if p1.ndim else float(p1)


def jacobi_delannoy_identity(p, beta: int, k: int) -> tuple[float, float, float]:
    """Compare ``psi[k+beta, k]`` with ``phi1^beta (-phi3)^k P_k^(0,beta)(-2 phi1 phi2/phi3 - 1)``.

    Returns (lhs, rhs, |lhs - rhs|).
    """
    phi1, phi2, phi3 = _params(p)
    if phi3 == 0:
        raise ValueError("the identity needs phi3 != 0")
    if beta < 0 or k < 0 or int(beta) != beta:
        raise ValueError("beta and k must be nonnegative integers")
    lhs = delannoy_closed_b(p, k + beta, k)
    x = -2 * phi1 * phi2 / phi3 - 1
    rhs = phi1**beta * (-phi3) ** k * jacobi_poly(k, 0.0, float(beta), x)
    return lhs, rhs, abs(lhs - rhs)


_SERIES_CUTOFF = 12.0


def _bessel_series(x: float, nu: int) -> float:
    h = x / 2
    term = h**nu / math.factorial(nu)
    total = term
    m = 0
    while True:
        m += 1
        term *= -h * h / (m * (m + nu))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) or m > 200:
            return total


def _bessel_hankel(x: float, nu: int) -> float:
    mu = 4.0 * nu * nu
    P, Q = 0.0, 0.0
    a = 1.0                     # a_k(nu) / x^k
    prev = math.inf
    for k in range(0, 40):
        if k > 0:
            a *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(a) > prev:       # asymptotic series started to diverge
            break
        prev = abs(a)
        if k % 2 == 0:
            P += (-1) ** (k // 2) * a
        else:
            Q += (-1) ** (k // 2) * a
        if abs(a) < 1e-17:
            break
    chi = x - nu * math.pi / 2 - math.pi / 4
    return math.sqrt(2 / (math.pi * x)) * (P * math.cos(chi) - Q * math.sin(chi))


def bessel_j01(x: float) -> tuple[float, float]:
    """``(J0(x), J1(x))``: power series below 12, Hankel expansion above."""
    x = float(x)
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x < _SERIES_CUTOFF:
        return _bessel_series(x, 0), _bessel_series(x, 1)
    return _bessel_hankel(x, 0), _bessel_hankel(x, 1)


@dataclass
class DecayDiagnostic:
    n: np.ndarray
    N: np.ndarray
    residual: np.ndarray
    scaled: np.ndarray
    slope: float

    @property
    def scaled_max(self) -> float:
        return float(np.max(self.scaled))


def asymptotic_decay_diagnostic(theta: float, beta: int,
                                n_range: Sequence[int]) -> DecayDiagnostic:
    """Residual of the leading Bessel approximation of ``P_n^(0,beta)(cos theta)``.

    ``residual(n) = |cos(theta/2)^beta P_n(cos theta) - sqrt(theta/sin theta) J0(N theta)|``
    with ``N = n + (beta+1)/2``; ``scaled = residual * N`` and ``slope`` is
    the least-squares slope of log residual against log N.
    """
    if not 0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    ns = np.asarray(list(n_range), dtype=int)
    N = ns + (beta + 1) / 2
    lead = math.sqrt(theta / math.sin(theta))
    res = np.array([abs(math.cos(theta / 2) ** beta * jacobi_poly(int(n), 0.0, float(beta),
                                                                  math.cos(theta))
                        - lead * bessel_j01(Nn * theta)[0]) for n, Nn in zip(ns, N)])
    ok = res > 0
    slope = float(np.polyfit(np.log(N[ok]), np.log(res[ok]), 1)[0]) if ok.sum() >= 2 else math.nan
    return DecayDiagnostic(ns, N, res, res * N, slope)


def _power_envelope(t: np.ndarray):
    """Fit ``M s^(-a)`` dominating the L1-shell maxima of a table (s >= 1)."""
    s = np.add.outer(np.arange(t.shape[0]), np.arange(t.shape[1]))
    top = t.shape[0] - 1
    m = np.array([np.abs(t[s == j]).max() for j in range(1, top + 1)])
    j = np.arange(1, top + 1)
    sel = (j >= top // 2) & (m > 0)
    if sel.sum() < 2:
        return None
    a = -np.polyfit(np.log(j[sel]), np.log(m[sel]), 1)[0]
    if a <= 0.1:
        return None
    return 1.05 * float(np.max(m * j**a)), float(a)


def required_box(p, x: float, start: int = 32, max_box: int = 4096) -> int:
    """Box size beyond which every ``|psi|`` is below ``1/x``.

    Uses an exponential envelope fitted on the complete L1 shells of the
    table, falling back to a power law when the decay is only algebraic
    (zeros of the symbol on the torus).  The box is enlarged until the
    envelope bound fits inside it.
    """
    box = start
    while True:
        t = delannoy_table(p, box, box)
        n = np.arange(box + 1)
        t = np.where(n[:, None] + n[None, :] <= box, t, 0.0)
        fit = decay_fit(CoefficientField(t, (0, 0), "causal-orthant"))
        if fit is not None:
            if math.isinf(fit.c):
                return 0
            need = max(0, math.ceil((math.log(fit.M) + math.log(x)) / fit.c))
        else:
            env = _power_envelope(t)
            if env is None:
                raise ValueError("no decay envelope fits the Delannoy table")
            M, a = env
            need = max(1, math.ceil((M * x) ** (1.0 / a)))
        if need <= box:
            return need
        if box >= max_box:
            raise ValueError("Delannoy decay too slow for the requested threshold")
        box = min(max(need, 2 * box), max_box)


def counting_function(p, x: float, box: int | None = None) -> int:
    """Number of (n, k) with ``psi[n, k] != 0`` and ``1/|psi[n, k]| <= x``."""
    if x <= 1:
        raise ValueError("x must exceed 1")
    need = required_box(p, x)
    if box is None:
        box = need
    elif box < need:
        raise ValueError(f"box {box} is smaller than the decay bound requires ({need})")
    t = np.abs(delannoy_table(p, box, box))
    return int(np.count_nonzero((t > 0) & (t >= 1.0 / x)))


def l1_sphere_count(d: int, n: int) -> int:
    """``|{k in Z^d : |k_1| + ... + |k_d| = n}|`` via recursion on the last coordinate."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    h = [1] + [2] * n           # d = 1
    for _ in range(d - 1):
        h = [sum(h[m - j] * (1 if j == 0 else 2) for j in range(m + 1)) for m in range(n + 1)]
    return h[n]


def sphere_bound_constant(d: int) -> int:
    """``C_d`` with ``l1_sphere_count(d, n) <= C_d n^(d-1)`` for n >= 1."""
    c = 2
    for _ in range(d - 1):
        c = 2 * c + 2
    return c
