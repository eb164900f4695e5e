"""Regularly varying scaling functions and the derived small-set normalization.

A scaling function has the parametric form

    a(s) = c * s**alpha * log(s + e)**beta,   a(0) = 0,

with coefficient c > 0, index alpha in [0, 1] and a slowly varying log
correction of exponent beta.  Its inverse b and the normalization
gamma(s) = 1 / b(1/s) turn a set measure into a time scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

__all__ = [
    "ScalingFunction",
    "GammaNormalizer",
    "DistortedNormalizer",
    "ScalingFit",
    "estimate_return_sequence",
]

# bracket for bisection-based inversion; downstream normalizations span
# many decades so this is deliberately wide
_BRACKET_LO = 1e-18
_BRACKET_HI = 1e18


@dataclass(frozen=True)
class ScalingFunction:
    """a(s) = c * s**alpha * ln(s+e)**beta, strictly increasing on [0, inf)."""

    c: float
    alpha: float
    beta: float = 0.0

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError(f"coefficient must be positive, got {self.c}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"index must lie in [0, 1], got {self.alpha}")
        if self.alpha == 0.0 and self.beta <= 0.0:
            raise ValueError("index 0 requires a positive log exponent so a -> inf")
        # monotonicity can fail for beta < 0; check on the working range
        if self.beta < 0.0:
            s = np.logspace(np.log10(_BRACKET_LO), np.log10(_BRACKET_HI), 2000)
            if np.any(np.diff(self.a(s)) <= 0.0):
                raise ValueError(
                    f"a(s) is not strictly increasing on the working range for "
                    f"(c={self.c}, alpha={self.alpha}, beta={self.beta})"
                )

    def a(self, s):
        """Evaluate a(s); accepts scalars or arrays, a(0) = 0."""
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.c * s**self.alpha * np.log(s + np.e) ** self.beta
        out = np.where(s == 0.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def b(self, y):
        """Inverse of a: the unique t >= 0 with a(t) = y."""
        y = np.asarray(y, dtype=float)
        if self.beta == 0.0:
            out = (y / self.c) ** (1.0 / self.alpha)
            return float(out) if out.ndim == 0 else out
        if y.ndim == 0:
            return self._b_scalar(float(y))
        return np.array([self._b_scalar(float(v)) for v in y.ravel()]).reshape(y.shape)

    def _b_scalar(self, y: float) -> float:
        if y == 0.0:
            return 0.0
        lo, hi = _BRACKET_LO, _BRACKET_HI
        while self.a(lo) > y and lo > 1e-300:
            lo *= 1e-6
        while self.a(hi) < y and hi < 1e300:
            hi *= 1e6
        return brentq(lambda t: self.a(t) - y, lo, hi, rtol=1e-13, maxiter=300)

    def gamma(self, s):
        """gamma(s) = 1 / b(1/s) for s > 0, gamma(0) = 0."""
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(s == 0.0, 0.0, 1.0 / self.b(np.where(s == 0.0, 1.0, 1.0 / s)))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GammaNormalizer:
    """Normalizes a raw return/hitting time phi to gamma(mu(E)) * phi."""

    source: ScalingFunction

    def scale(self, mu_e: float) -> float:
        if not mu_e > 0:
            raise ValueError("target measure must be positive")
        return float(self.source.gamma(mu_e))

    def normalize(self, phi, mu_e: float):
        return self.scale(mu_e) * np.asarray(phi, dtype=float)

    def describe(self, mu_e: float) -> str:
        return f"gamma({mu_e:.6g})*phi = {self.scale(mu_e):.6g}*phi"


@dataclass(frozen=True)
class DistortedNormalizer:
    """Normalizes phi to mu(E) * a(phi) (the distorted statistic)."""

    source: ScalingFunction

    def scale(self, mu_e: float) -> float:
        if not mu_e > 0:
            raise ValueError("target measure must be positive")
        return float(mu_e)

    def normalize(self, phi, mu_e: float):
        return self.scale(mu_e) * self.source.a(np.asarray(phi, dtype=float))

    def describe(self, mu_e: float) -> str:
        return f"{mu_e:.6g}*a(phi)"


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of a scaling function to an empirical wandering rate."""

    function: ScalingFunction
    fitted_index: float
    residual: float


def estimate_return_sequence(wandering_rate, alpha: float) -> ScalingFit:
    """Fit a ScalingFunction to the sequence abar_n = n / (Gamma(2-alpha) * w_n).

    ``wandering_rate`` is the series w_1..w_N (non-decreasing, positive).
    The fit is a log-log least squares over the tail half of the series,
    where the asymptotic relation between a_n and w_n has settled.  Raises
    if the fitted index is further than 0.1 from the supplied alpha.
    """
    w = np.asarray(wandering_rate, dtype=float)
    if w.ndim != 1 or len(w) < 100:
        raise ValueError("need a wandering-rate series of length >= 100")
    if np.any(w <= 0) or np.any(np.diff(w) < 0):
        raise ValueError("wandering rate must be positive and non-decreasing")
    n = np.arange(1, len(w) + 1, dtype=float)
    abar = n / (gamma_fn(2.0 - alpha) * w)

    tail = slice(len(w) // 2, None)
    x = np.log(n[tail])
    y = np.log(abar[tail])
    coef, diag = np.polynomial.polynomial.polyfit(x, y, 1, full=True)
    logc, idx = coef[0], coef[1]
    resid = float(np.sqrt(diag[0][0] / len(x))) if len(diag[0]) else 0.0

    if abs(idx - alpha) > 0.1:
        raise ValueError(
            f"fitted index {idx:.4f} is inconsistent with the supplied alpha={alpha}"
        )
    fn = ScalingFunction(c=float(np.exp(logc)), alpha=float(np.clip(idx, 1e-6, 1.0)))
    return ScalingFit(function=fn, fitted_index=float(idx), residual=resid)
