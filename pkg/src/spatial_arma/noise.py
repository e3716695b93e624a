"""Innovation distributions with analytically declared moment facts.

Every family exposes its exact tail ``P(|Z| > x)``, the moment flags the
existence results consume, and a sampler that maps pairs of uniforms on
(0, 1] to draws, so that counter-based generators can drive it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "NoiseSpec",
    "gaussian",
    "pareto_tail",
    "log_pareto",
    "cauchy",
    "two_point",
    "deterministic",
    "catalog",
    "noise_from_name",
]

_FAMILIES = ("gaussian", "pareto", "logpareto", "cauchy", "twopoint", "deterministic")
# log(|Z|) is capped here so LogPareto draws stay finite doubles
_LOG_CAP = 700.0


@dataclass(frozen=True)
class NoiseSpec:
    """An i.i.d. innovation law.

    Parameters
    ----------
    family : str
        One of gaussian, pareto, logpareto, cauchy, twopoint, deterministic.
    param : float
        sigma (gaussian), tail exponent a (pareto), q (logpareto) or the
        constant K (deterministic).  Ignored for cauchy and twopoint.
    symmetric : bool
        Whether the law of Z equals the law of -Z.  Only pareto and
        logpareto may be asymmetric (then Z >= 0).
    """

    family: str
    param: float = 1.0
    symmetric: bool = True

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown noise family {self.family!r}")
        p = float(self.param)
        if not math.isfinite(p):
            raise ValueError("noise parameter must be finite")
        if self.family in ("gaussian", "pareto", "logpareto") and p <= 0:
            raise ValueError(f"{self.family} needs a positive parameter")
        if self.family in ("gaussian", "cauchy", "twopoint") and not self.symmetric:
            raise ValueError(f"{self.family} noise is symmetric by construction")
        if self.family == "deterministic":
            object.__setattr__(self, "symmetric", p == 0)
        object.__setattr__(self, "param", p)

    # -- declared facts -------------------------------------------------
    @property
    def nondeterministic(self) -> bool:
        return self.family != "deterministic"

    @property
    def finite_variance(self) -> bool:
        """E|Z|^2 < inf."""
        if self.family == "pareto":
            return self.param > 2
        return self.family not in ("logpareto", "cauchy")

    @property
    def finite_mean(self) -> bool:
        if self.family == "pareto":
            return self.param > 1
        return self.family not in ("logpareto", "cauchy")

    @property
    def zero_mean(self) -> bool:
        """E Z exists and equals 0."""
        if not self.finite_mean:
            return False
        if self.family == "deterministic":
            return self.param == 0
        return self.symmetric

    def log_moment_finite(self, m: float) -> bool:
        """Whether ``E log_+^m |Z| < inf`` for ``m > 0``."""
        if m <= 0:
            raise ValueError("log-moment order must be positive")
        if self.family == "logpareto":
            return m < self.param
        return True

    @property
    def log_moments(self) -> dict[int, bool]:
        return {m: self.log_moment_finite(m) for m in range(1, 6)}

    def flags(self) -> dict:
        return {
            "symmetric": self.symmetric,
            "nondeterministic": self.nondeterministic,
            "finite_variance": self.finite_variance,
            "zero_mean": self.zero_mean,
            "log_moments": {str(k): v for k, v in self.log_moments.items()},
        }

    def describe(self) -> str:
        if self.family in ("cauchy", "twopoint"):
            return self.family
        sym = "" if self.symmetric or self.family == "deterministic" else ",asym"
        return f"{self.family}({self.param:g}{sym})"

    # -- distribution ---------------------------------------------------
    @property
    def second_moment(self) -> float:
        """``E|Z|^2`` (inf when the declared variance is infinite)."""
        f, p = self.family, self.param
        if not self.finite_variance:
            return math.inf
        if f == "gaussian":
            return p * p
        if f == "pareto":
            return p / (p - 2)
        if f == "twopoint":
            return 1.0
        return p * p

    def tail(self, x, inclusive: bool = False):
        """``P(|Z| > x)``, or ``P(|Z| >= x)`` with ``inclusive=True``.

        The complex Gaussian has independent real and imaginary parts of
        variance sigma^2/2 each, so ``P(|Z| > x) = exp(-x^2/sigma^2)``.
        """
        x = np.asarray(x, dtype=float)
        f, p = self.family, self.param
        with np.errstate(divide="ignore", over="ignore"):
            if f == "gaussian":
                out = np.exp(-(x / p) ** 2)
            elif f == "pareto":
                out = np.where(x < 1, 1.0, np.maximum(x, 1.0) ** -p)
            elif f == "logpareto":
                out = np.where(x < math.e, 1.0, np.log(np.maximum(x, math.e)) ** -p)
            elif f == "cauchy":
                out = 1.0 - 2.0 / math.pi * np.arctan(x)
            else:
                k = 1.0 if f == "twopoint" else abs(p)
                out = np.where((x <= k) if inclusive else (x < k), 1.0, 0.0)
        out = np.where(x < 0, 1.0, out)
        return out if out.ndim else float(out)

    def truncated_second_moment(self, u):
        """``E[|Z|^2 1{|Z| < u}]``, vectorised over ``u``."""
        u = np.asarray(u, dtype=float)
        f, p = self.family, self.param
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if f == "gaussian":
                v = (u / p) ** 2
                out = p * p * -np.expm1(-v) - p * p * v * np.exp(-v)
            elif f == "pareto":
                uu = np.maximum(u, 1.0)
                if p == 2:
                    out = 2.0 * np.log(uu)
                else:
                    out = p * (uu ** (2 - p) - 1) / (2 - p)
            elif f == "cauchy":
                out = 2 / math.pi * (u - np.arctan(u))
            elif f == "logpareto":
                out = np.vectorize(self._logpareto_m2, otypes=[float])(u)
            else:
                k = 1.0 if f == "twopoint" else abs(p)
                out = np.where(k < u, k * k, 0.0)
        out = np.where(u <= 0, 0.0, out)
        return out if out.ndim else float(out)

    def log_tail(self, y, inclusive: bool = False):
        """``P(|Z| > e^y)`` (``>=`` with ``inclusive``), stable for large ``y``."""
        y = np.asarray(y, dtype=float)
        f, p = self.family, self.param
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if f == "gaussian":
                out = np.exp(-np.exp(2 * (y - math.log(p))))
            elif f == "pareto":
                out = np.exp(-p * np.maximum(y, 0.0))
            elif f == "logpareto":
                out = np.where(y < 1, 1.0, np.maximum(y, 1.0) ** -p)
            elif f == "cauchy":
                out = 2 / math.pi * np.arctan(np.exp(-y))
            else:
                k = 1.0 if f == "twopoint" else abs(p)
                lk = math.log(k) if k > 0 else -math.inf
                out = np.where((y <= lk) if inclusive else (y < lk), 1.0, 0.0)
        return out if out.ndim else float(out)

    def scaled_truncated_m2(self, y):
        """``E[|Z|^2 1{|Z| < u}] / u^2`` at ``u = e^y``, stable for large ``y``."""
        y = np.asarray(y, dtype=float)
        f, p = self.family, self.param
        with np.errstate(over="ignore", divide="ignore", invalid="ignore", under="ignore"):
            if f == "gaussian":
                v = np.exp(2 * (y - math.log(p)))
                small = v < 1e-8
                big = v > 700
                vs = np.where(small | big, 1.0, v)
                out = np.where(small, v / 2, (-np.expm1(-vs) - vs * np.exp(-vs)) / vs)
                out = np.where(big, 1.0 / v, out)
            elif f == "pareto":
                yy = np.maximum(y, 0.0)
                if p == 2:
                    out = 2 * yy * np.exp(-2 * yy)
                else:
                    out = p * (np.exp(-p * yy) - np.exp(-2 * yy)) / (2 - p)
            elif f == "cauchy":
                out = 2 / math.pi * (np.exp(-y) - np.arctan(np.exp(y)) * np.exp(-2 * y))
            elif f == "logpareto":
                out = np.vectorize(self._logpareto_scaled_m2, otypes=[float])(y)
            else:
                k = 1.0 if f == "twopoint" else abs(p)
                lk = math.log(k) if k > 0 else -math.inf
                out = np.where(lk < y, k * k * np.exp(-2 * y), 0.0)
        return out if out.ndim else float(out)

    def _logpareto_scaled_m2(self, y: float) -> float:
        if y <= 1:
            return 0.0
        q = self.param
        return integrate.quad(lambda w: q * math.exp(-2 * w) * (y - w) ** (-q - 1), 0.0, y - 1,
                              limit=200)[0]

    def _logpareto_m2(self, u: float) -> float:
        # |Z| = exp(Y) with P(Y > y) = y^-q on y >= 1
        if u <= math.e:
            return 0.0
        q = self.param
        top = math.log(u)
        return integrate.quad(lambda y: q * math.exp(2 * y) * y ** (-q - 1), 1.0, top,
                              limit=200)[0]

    def from_uniforms(self, u1, u2):
        """Map uniforms on (0, 1] to complex draws by inversion.

        The Gaussian uses the polar Box-Muller form; the other families are
        real valued, with the sign taken from ``u2`` when symmetric.
        """
        u1 = np.asarray(u1, dtype=float)
        u2 = np.asarray(u2, dtype=float)
        f, p = self.family, self.param
        sign = np.where(u2 <= 0.5, 1.0, -1.0) if self.symmetric else 1.0
        if f == "gaussian":
            return p * np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)
        if f == "pareto":
            out = sign * u1 ** (-1.0 / p)
        elif f == "logpareto":
            with np.errstate(over="ignore"):
                out = sign * np.exp(np.minimum(u1 ** (-1.0 / p), _LOG_CAP))
        elif f == "cauchy":
            out = np.tan(np.pi * (u1 - 0.5))
        elif f == "twopoint":
            out = np.where(u1 <= 0.5, 1.0, -1.0)
        else:
            out = np.full(np.broadcast(u1, u2).shape, p)
        return np.asarray(out, dtype=complex)


def gaussian(sigma: float = 1.0) -> NoiseSpec:
    return NoiseSpec("gaussian", sigma)


def pareto_tail(a: float, symmetric: bool = True) -> NoiseSpec:
    return NoiseSpec("pareto", a, symmetric)


def log_pareto(q: float, symmetric: bool = True) -> NoiseSpec:
    return NoiseSpec("logpareto", q, symmetric)


def cauchy() -> NoiseSpec:
    return NoiseSpec("cauchy", 1.0)


def two_point() -> NoiseSpec:
    return NoiseSpec("twopoint", 1.0)


def deterministic(K: float = 0.0) -> NoiseSpec:
    return NoiseSpec("deterministic", K)


def catalog() -> dict[str, NoiseSpec]:
    """The nondeterministic reference laws used in sweeps."""
    return {
        "gaussian": gaussian(1.0),
        "cauchy": cauchy(),
        "twopoint": two_point(),
        "logpareto1.5": log_pareto(1.5),
    }


def noise_from_name(text: str) -> NoiseSpec:
    """Parse ``gaussian``, ``gaussian:2``, ``pareto:1.5``, ``pareto:3:asym``,
    ``logpareto:1.5``, ``cauchy``, ``twopoint``, ``deterministic:0``."""
    parts = text.strip().lower().split(":")
    fam = parts[0]
    if fam not in _FAMILIES:
        raise ValueError(f"unknown noise family {fam!r}")
    try:
        param = float(parts[1]) if len(parts) > 1 else (0.0 if fam == "deterministic" else 1.0)
    except ValueError:
        raise ValueError(f"bad noise parameter in {text!r}") from None
    symmetric = not (len(parts) > 2 and parts[2] == "asym")
    if fam in ("pareto", "logpareto") and len(parts) < 2:
        raise ValueError(f"{fam} needs a parameter, e.g. {fam}:1.5")
    return NoiseSpec(fam, param, symmetric)
