"""Existence verdicts for spatial ARMA equations.

The classifiers combine numerical evidence about the model polynomials with
the declared moment facts of the noise.  A report lists every condition that
was evaluated, its status and the evidence behind it, so an ``Unknown``
verdict shows exactly which leg failed to fire.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .noise import NoiseSpec
from .polycore import ModelSpec, arma_polys
from .spectral import (CoefficientField, TorusGrid, causal_alpha, fourier_psi,
                       h2_verdict, l2_spectral_sequence, zero_free_closed_polydisc,
                       zero_search_torus)

__all__ = [
    "Condition",
    "ExistenceReport",
    "BilinearZeroReport",
    "bidisc_zero_free_bilinear",
    "check_linear_stationary",
    "check_causal",
    "check_first_order_2d",
    "default_causal_box",
]

EXISTS, NOT_EXISTS, UNKNOWN = "Exists", "NotExists", "Unknown"
PASS, FAIL, UNDECIDED, SKIPPED = "pass", "fail", "undecided", "not-applicable"

CITE_L2 = "linear solutions force Theta/Phi into L2 of the torus"
CITE_LINEAR_SUFF = "zero-free torus with finite E log_+^d |Z| gives an absolutely convergent linear solution"
CITE_H2 = "causal solutions force Theta/Phi into H2"
CITE_CAUSAL_I = "zero-free closed polydisc with finite E log_+^d |Z| gives a causal solution"
CITE_CAUSAL_II = "finite variance, zero mean and Theta/Phi in H2 give a causal solution"
CITE_FIRST_ORDER = "first-order planar AR: zero-free closed bidisc plus the matching log-moment, and only then"
CITE_FINITE_MA = "a finite moving average is always a solution"


@dataclass
class Condition:
    name: str
    status: str
    evidence: str
    citation: str

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "evidence": self.evidence,
                "citation": self.citation}


@dataclass
class ExistenceReport:
    mode: str
    verdict: str
    conditions: list[Condition] = field(default_factory=list)
    coefficients: Optional[CoefficientField] = None
    leg: Optional[str] = None

    @property
    def citations(self) -> list[str]:
        out = []
        for c in self.conditions:
            if c.citation not in out:
                out.append(c.citation)
        return out

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps({
            "mode": self.mode,
            "verdict": self.verdict,
            "leg": self.leg,
            "conditions": [c.as_dict() for c in self.conditions],
            "citations": self.citations,
        }, indent=2)


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _require_random(noise: NoiseSpec, allow_deterministic: bool = False):
    if not isinstance(noise, NoiseSpec):
        raise TypeError("noise must be a NoiseSpec")
    if not noise.nondeterministic and not allow_deterministic:
        raise ValueError("deterministic noise needs allow_deterministic=True")


# ---------------------------------------------------------------------------
# first-order planar model

@dataclass
class BilinearZeroReport:
    kind: str                       # "ZeroFree" or "ZeroAt"
    min_modulus: float
    point: Optional[tuple[complex, complex]] = None

    @property
    def zero_free(self) -> bool:
        return self.kind == "ZeroFree"


def bidisc_zero_free_bilinear(phi1: float, phi2: float, phi3: float,
                              tol: float = 1e-10) -> BilinearZeroReport:
    """Zeros of ``1 - phi1 z1 - phi2 z2 - phi3 z1 z2`` on the closed bidisc.

    For fixed ``z1`` the only zero in ``z2`` is ``(1 - phi1 z1) / (phi2 + phi3 z1)``,
    so the polynomial is zero-free iff ``|1 - phi1 z1| > |phi2 + phi3 z1|`` on
    the closed disc.  When ``|phi1| >= 1`` this fails at ``z1 = 1/phi1``.
    Otherwise ``(phi2 + phi3 z1)/(1 - phi1 z1)`` is holomorphic and the
    maximum principle moves the test to ``|z1| = 1``, where for real weights

        |a|^2 - |b|^2 = 1 + phi1^2 - phi2^2 - phi3^2 - 2 (phi1 + phi2 phi3) cos w

    is linear in ``cos w``.  The reported minimum modulus is
    ``min_w (|a| - |b|)``, the minimum of ``|Phi|`` over the torus and hence
    over the bidisc.
    """
    phi1, phi2, phi3 = (float(v) for v in (phi1, phi2, phi3))
    if phi1 == phi2 == phi3 == 0:
        raise ValueError("at least one coefficient must be nonzero")
    if not all(math.isfinite(v) for v in (phi1, phi2, phi3)):
        raise ValueError("coefficients must be finite")
    if abs(phi1) >= 1:
        return BilinearZeroReport("ZeroAt", 0.0, (complex(1 / phi1), 0j))
    s = phi1 + phi2 * phi3
    gap = 1 + phi1**2 - phi2**2 - phi3**2 - 2 * abs(s)
    if gap <= tol:
        z1 = complex(1.0 if s >= 0 else -1.0)
        a = 1 - phi1 * z1
        b = phi2 + phi3 * z1
        return BilinearZeroReport("ZeroAt", 0.0, (z1, a / b))

    def f(c):
        return math.sqrt(max(1 + phi1**2 - 2 * phi1 * c, 0.0)) - \
            math.sqrt(max(phi2**2 + phi3**2 + 2 * phi2 * phi3 * c, 0.0))

    cs = np.linspace(-1.0, 1.0, 2049)
    vals = np.sqrt(np.maximum(1 + phi1**2 - 2 * phi1 * cs, 0.0)) - \
        np.sqrt(np.maximum(phi2**2 + phi3**2 + 2 * phi2 * phi3 * cs, 0.0))
    i = int(np.argmin(vals))
    lo, hi = cs[max(i - 1, 0)], cs[min(i + 1, cs.size - 1)]
    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-14})
    return BilinearZeroReport("ZeroFree", float(min(vals[i], res.fun)))


def check_first_order_2d(phi1: float, phi2: float, phi3: float, noise: NoiseSpec,
                         coefficient_box: int = 0) -> ExistenceReport:
    """Causal solvability of ``Y_t - phi1 Y_{t-e1} - phi2 Y_{t-e2} - phi3 Y_{t-e1-e2} = Z_t``.

    The verdict is always ``Exists`` or ``NotExists``.  With
    ``coefficient_box > 0`` an existing solution carries its Delannoy
    coefficients on ``{0..box}^2``.
    """
    _require_random(noise)
    zr = bidisc_zero_free_bilinear(phi1, phi2, phi3)
    nonzero = sum(float(v) != 0 for v in (phi1, phi2, phi3))
    m = 2 if nonzero >= 2 else 1
    conds = []
    if zr.zero_free:
        conds.append(Condition("zero-free closed bidisc", PASS,
                               f"min |Phi| on the torus = {_g(zr.min_modulus)}", CITE_FIRST_ORDER))
    else:
        z1, z2 = zr.point
        conds.append(Condition("zero-free closed bidisc", FAIL,
                               f"zero at z1={_g(z1.real)}{z1.imag:+.17g}j, "
                               f"z2={_g(z2.real)}{z2.imag:+.17g}j", CITE_FIRST_ORDER))
    ok = noise.log_moment_finite(m)
    conds.append(Condition(f"E log_+^{m} |Z| finite", PASS if ok else FAIL,
                           f"{nonzero} nonzero coefficient(s); declared by {noise.describe()}",
                           CITE_FIRST_ORDER))
    verdict = EXISTS if zr.zero_free and ok else NOT_EXISTS
    rep = ExistenceReport("FirstOrder2D", verdict, conds)
    if verdict == EXISTS and coefficient_box > 0:
        from .delannoy import delannoy_field
        rep.coefficients = delannoy_field((phi1, phi2, phi3), coefficient_box)
    return rep


# ---------------------------------------------------------------------------
# general models

def default_causal_box(dim: int) -> int:
    """Per-axis box for the causal recursion, about two million nodes in total."""
    return {1: 4096, 2: 128, 3: 48, 4: 20}.get(dim, max(4, int(2e6 ** (1 / dim)) - 1))


def check_linear_stationary(model: ModelSpec, noise: NoiseSpec, levels: Optional[int] = None,
                            allow_deterministic: bool = False,
                            keep_box: int = 8) -> ExistenceReport:
    """Linear strictly stationary solutions ``Y_t = sum_k psi_k Z_{t-k}``.

    Necessary: ``Theta/Phi`` square integrable on the torus (divergent
    quadrature refutes).  Sufficient: ``Phi`` has no zero on the torus and
    ``E log_+^d |Z| < inf``.  Anything in between is ``Unknown``.
    """
    _require_random(noise, allow_deterministic)
    d = model.dim
    phi, _ = arma_polys(model)
    conds: list[Condition] = []
    if model.is_pure_ma:
        conds.append(Condition("finite moving average", PASS, "R is empty", CITE_FINITE_MA))
        return ExistenceReport("LinearStationary", EXISTS, conds, leg="finite-ma")

    torus = zero_search_torus(phi)
    if torus.found:
        ev = f"{len(torus.zeros)} zero(s) found, min |Phi| = {_g(torus.min_modulus)}"
        conds.append(Condition("zero-free torus", FAIL, ev, CITE_LINEAR_SUFF))
    else:
        conds.append(Condition("zero-free torus", PASS,
                               f"min |Phi| = {_g(torus.min_modulus)}", CITE_LINEAR_SUFF))

    if not noise.nondeterministic:
        # constant innovations: a linear solution is a constant field, which needs
        # absolute summability of psi (guaranteed by a zero-free torus) or K = 0
        if noise.param == 0:
            conds.append(Condition("zero innovations", PASS, "Y = 0 solves", CITE_FINITE_MA))
            return ExistenceReport("LinearStationary", EXISTS, conds, leg="deterministic")
        verdict = EXISTS if not torus.found else UNKNOWN
        return ExistenceReport("LinearStationary", verdict, conds, leg="deterministic")

    seq = l2_spectral_sequence(model, levels=levels)
    l2_status = {"Finite": PASS, "Divergent": FAIL}.get(seq.verdict, UNDECIDED)
    ev = "estimates " + ", ".join(_g(v) for v in seq.estimates)
    if seq.diagnostic:
        ev += "; " + seq.diagnostic
    conds.append(Condition("Theta/Phi in L2(T^d)", l2_status, ev, CITE_L2))

    lm = noise.log_moment_finite(d)
    conds.append(Condition(f"E log_+^{d} |Z| finite", PASS if lm else FAIL,
                           f"declared by {noise.describe()}", CITE_LINEAR_SUFF))

    if l2_status == FAIL:
        return ExistenceReport("LinearStationary", NOT_EXISTS, conds)
    if not torus.found and lm:
        rep = ExistenceReport("LinearStationary", EXISTS, conds, leg="zero-free-torus")
        grid = TorusGrid.uniform(d, max(64, 4 * (2 * keep_box + 1)))
        if grid.size <= 2**22:
            rep.coefficients = fourier_psi(model, grid, keep_box)
        return rep
    return ExistenceReport("LinearStationary", UNKNOWN, conds)


def check_causal(model: ModelSpec, noise: NoiseSpec, box: Optional[int] = None) -> ExistenceReport:
    """Causal solutions for index sets inside the nonnegative orthant.

    Leg (i): ``Phi`` zero-free on the closed polydisc and ``E log_+^d |Z| < inf``.
    Leg (ii): ``E|Z|^2 < inf``, ``E Z = 0`` and ``Theta/Phi`` in H2.
    Necessity: ``Theta/Phi`` must lie in H2, judged from the shell sums of
    the power-series coefficients.
    """
    if not model.is_causal_mode:
        raise ValueError("causal checks need R and S in the nonnegative orthant")
    _require_random(noise)
    d = model.dim
    conds: list[Condition] = []
    if model.is_pure_ma:
        conds.append(Condition("finite moving average", PASS, "R is empty", CITE_FINITE_MA))
        return ExistenceReport("Causal", EXISTS, conds, leg="finite-ma")

    box = default_causal_box(d) if box is None else int(box)
    alpha = causal_alpha(model, box)
    h2, slope = h2_verdict(alpha)
    h2_status = {"Finite": PASS, "Divergent": FAIL}.get(h2, UNDECIDED)
    conds.append(Condition("Theta/Phi in H2", h2_status,
                           f"shell-sum log-log slope {_g(slope)} on box {box}", CITE_H2))

    phi, _ = arma_polys(model)
    disc = zero_free_closed_polydisc(phi)
    if disc.zero_free:
        conds.append(Condition("zero-free closed polydisc", PASS,
                               f"min |Phi| on the torus = {_g(disc.min_modulus)}", CITE_CAUSAL_I))
    else:
        pt = ", ".join(f"{_g(z.real)}{z.imag:+.17g}j" for z in disc.point)
        conds.append(Condition("zero-free closed polydisc", FAIL, f"zero at ({pt})",
                               CITE_CAUSAL_I))
    lm = noise.log_moment_finite(d)
    conds.append(Condition(f"E log_+^{d} |Z| finite", PASS if lm else FAIL,
                           f"declared by {noise.describe()}", CITE_CAUSAL_I))
    var_ok = noise.finite_variance and noise.zero_mean
    conds.append(Condition("E|Z|^2 finite and E Z = 0", PASS if var_ok else FAIL,
                           f"declared by {noise.describe()}", CITE_CAUSAL_II))

    if h2_status == FAIL:
        return ExistenceReport("Causal", NOT_EXISTS, conds)
    if disc.zero_free and lm:
        return ExistenceReport("Causal", EXISTS, conds, coefficients=alpha, leg="i")
    if var_ok and h2_status == PASS:
        return ExistenceReport("Causal", EXISTS, conds, coefficients=alpha, leg="ii")
    return ExistenceReport("Causal", UNKNOWN, conds)

