"""Closed-form limit laws for normalized return and hitting times.

The central object is the law of E**(1/alpha) * S_alpha where E is a unit
exponential and S_alpha a one-sided (positive) stable variable of order
alpha normalized by E[exp(-s*S_alpha)] = exp(-s**alpha).  Its CDF is

    H_alpha(t) = 1 - ML_alpha(-t**alpha),

with ML_alpha the one-parameter Mittag-Leffler function; for alpha = 1 the
stable factor degenerates to the constant 1 and H_1 is the unit
exponential CDF.  Also provided: the algebraic law G0(t) = t/(1+t) and the
degenerate point masses at 0 and infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

__all__ = [
    "LimitLaw",
    "mittag_leffler_neg",
    "cdf_H",
    "cdf_G0",
    "sample_one_sided_stable",
    "sample_H",
    "halpha",
    "gzero",
    "exponential",
    "delta_zero",
    "delta_infinity",
]

_SERIES_MAX_TERMS = 200
_SERIES_TERM_TOL = 1e-15
# the power series is reliable while x**(1/alpha) <= this; beyond it the
# spectral integral representation takes over
_SERIES_RADIUS = 10.0


def _ml_series(alpha: float, x: float) -> float:
    """Power series sum_k (-x)^k / Gamma(1 + alpha k), truncated adaptively."""
    total = 0.0
    for k in range(_SERIES_MAX_TERMS):
        term = x**k / gamma_fn(1.0 + alpha * k)
        total += -term if k % 2 else term
        if k > 0 and term < _SERIES_TERM_TOL:
            break
    return total


def _ml_spectral(alpha: float, x: float) -> float:
    """Spectral-density integral for ML_alpha(-x), stable for large x.

    ML_alpha(-x) = int_0^inf K(r) exp(-r * x**(1/alpha)) dr with
    K(r) = sin(pi a)/pi * r^(a-1) / (r^(2a) + 2 r^a cos(pi a) + 1);
    substituting v = r * x**(1/alpha) keeps the integrand well scaled.
    """
    t = x ** (1.0 / alpha)
    s, c = np.sin(np.pi * alpha), np.cos(np.pi * alpha)

    def integrand(v: float) -> float:
        r = v / t
        ra = r**alpha
        k = (s / np.pi) * r ** (alpha - 1.0) / (ra * ra + 2.0 * ra * c + 1.0)
        return np.exp(-v) * k / t

    val, _ = quad(integrand, 0.0, 50.0, limit=200)
    return val


def mittag_leffler_neg(alpha: float, x):
    """ML_alpha(-x) for x >= 0 and alpha in (0, 1]."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {alpha}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("argument must be nonnegative")
    if alpha == 1.0:
        out = np.exp(-x)
        return float(out) if out.ndim == 0 else out
    flat = np.atleast_1d(x).ravel()
    out = np.empty_like(flat)
    for i, xi in enumerate(flat):
        if xi == 0.0:
            out[i] = 1.0
        elif xi ** (1.0 / alpha) <= _SERIES_RADIUS:
            out[i] = _ml_series(alpha, xi)
        else:
            out[i] = _ml_spectral(alpha, xi)
    out = out.reshape(np.atleast_1d(x).shape)
    return float(out[0]) if x.ndim == 0 else out


def cdf_H(alpha: float, t):
    """CDF of E**(1/alpha) * S_alpha at t >= 0."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {alpha}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("evaluation point must be nonnegative")
    if alpha == 1.0:
        out = -np.expm1(-t)
    else:
        out = 1.0 - mittag_leffler_neg(alpha, t**alpha)
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def cdf_G0(t):
    """CDF t / (1 + t) of the algebraic limit law."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("evaluation point must be nonnegative")
    out = t / (1.0 + t)
    return float(out) if out.ndim == 0 else out


def sample_one_sided_stable(alpha: float, rng: np.random.Generator, size=None):
    """Positive stable samples with Laplace transform exp(-s**alpha).

    Kanter's representation: with U uniform on (0, pi) and W unit
    exponential,

        X = (A(U) / W) ** ((1 - alpha) / alpha),
        A(u) = (sin(alpha u)**alpha * sin((1-alpha) u)**(1-alpha)
                / sin(u)) ** (1 / (1 - alpha)).

    For alpha = 1 the law degenerates to the constant 1.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return 1.0 if size is None else np.ones(size)
    u = rng.uniform(0.0, np.pi, size)
    w = rng.exponential(1.0, size)
    a = (
        np.sin(alpha * u) ** alpha
        * np.sin((1.0 - alpha) * u) ** (1.0 - alpha)
        / np.sin(u)
    ) ** (1.0 / (1.0 - alpha))
    return (a / w) ** ((1.0 - alpha) / alpha)


def sample_H(alpha: float, rng: np.random.Generator, size=None):
    """Samples of E**(1/alpha) * S_alpha."""
    e = rng.exponential(1.0, size)
    return e ** (1.0 / alpha) * sample_one_sided_stable(alpha, rng, size)


@dataclass(frozen=True)
class LimitLaw:
    """An evaluable limit law; possibly a sub-probability (mass < 1)."""

    tag: str
    cdf: Callable[[np.ndarray], np.ndarray]
    alpha: Optional[float] = None
    sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = field(
        default=None, repr=False
    )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.sampler is None:
            raise ValueError(f"law {self.tag!r} has no sampler")
        return self.sampler(rng, size)


def halpha(alpha: float) -> LimitLaw:
    return LimitLaw(
        tag=f"H({alpha})",
        cdf=lambda t, a=alpha: cdf_H(a, t),
        alpha=alpha,
        sampler=lambda rng, size, a=alpha: sample_H(a, rng, size),
    )


def gzero() -> LimitLaw:
    return LimitLaw(tag="G0", cdf=cdf_G0)


def exponential() -> LimitLaw:
    return LimitLaw(
        tag="Exp",
        cdf=lambda t: -np.expm1(-np.asarray(t, dtype=float)),
        alpha=1.0,
        sampler=lambda rng, size: rng.exponential(1.0, size),
    )


def delta_zero() -> LimitLaw:
    return LimitLaw(tag="delta0", cdf=lambda t: np.ones_like(np.asarray(t, dtype=float)))


def delta_infinity() -> LimitLaw:
    """The null sub-distribution: all mass escapes to infinity."""
    return LimitLaw(
        tag="deltaInf", cdf=lambda t: np.zeros_like(np.asarray(t, dtype=float))
    )
