"""Return-time <-> hitting-time integral transforms.

The forward map sends a return-time law Ft to the hitting-time law

    F(t) = (1/Gamma(a)) * int_0^t (t-s)**(a-1) * (1 - Ft(s)) ds,

the Riemann-Liouville fractional integral of order ``a`` of 1 - Ft; for
a = 1 this is the plain integral of the finite-measure theory.  The
coefficient convention (1/Gamma(a) rather than a) is fixed so that the
unique fixed point of the map is exactly the H_a law of module ``laws``;
the scaling coefficients in module ``systems`` follow the same convention.

The weakly singular kernel is handled by product integration: 1 - Ft is
interpolated piecewise linearly on a uniform grid and the kernel moments
are integrated exactly per cell, so the singularity at s = t costs no
accuracy.  The inverse transform solves the same discretization as a
lower-triangular system, making invert(forward(.)) exact up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma as gamma_fn

from .simulate import SubDistribution

__all__ = ["TransformSpec", "forward", "invert", "change_of_variables",
           "fixed_point", "resample"]

KINDS = ("hlv", "fractional", "distorted_positive", "distorted_zero")


@dataclass(frozen=True)
class TransformSpec:
    """Transform family selector.

    kind:
      * "hlv"                -- finite-measure forward map (integral of 1 - Ft)
      * "fractional"         -- fractional forward map of order alpha in (0, 1]
      * "distorted_positive" -- forward map for the distorted statistic,
                                alpha in (0, 1]
      * "distorted_zero"     -- algebraic forward map G(t) = t (1 - Gt(t))
    """

    kind: str
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.kind in ("fractional", "distorted_positive"):
            if not 0.0 < self.alpha <= 1.0:
                raise ValueError(f"order must lie in (0, 1], got {self.alpha}")


def _uniform_h(grid: np.ndarray) -> float:
    d = np.diff(grid)
    h = d[0]
    if len(grid) < 8:
        raise ValueError("grid too coarse: need at least 8 points")
    if not np.allclose(d, h, rtol=1e-9, atol=0.0):
        raise ValueError("transforms require a uniform grid")
    return float(h)


def _kernel_moments(alpha: float, h: float, m: int):
    """Exact cell integrals of (t-s)**(alpha-1)/Gamma(alpha) against 1 and s.

    For lag ell >= 1 (cell ending ell*h before the evaluation point):
      I0[ell-1] = int over the cell of the kernel,
      I1[ell-1] = same against the in-cell linear coordinate.
    """
    lag = np.arange(1, m + 1) * h
    d1, d0 = lag, lag - h
    i0 = (d1**alpha - d0**alpha) / alpha
    i1 = d1 * i0 - (d1 ** (alpha + 1.0) - d0 ** (alpha + 1.0)) / (alpha + 1.0)
    g = gamma_fn(alpha)
    return i0 / g, i1 / g


def _forward_values(ft: np.ndarray, alpha: float, h: float) -> np.ndarray:
    """Fractional forward map on node values (piecewise-linear data)."""
    m = len(ft) - 1
    u = 1.0 - ft
    a_coef = u[:-1]
    b_coef = np.diff(u) / h
    i0, i1 = _kernel_moments(alpha, h, m)
    out = np.zeros(m + 1)
    out[1:] = fftconvolve(a_coef, i0)[:m] + fftconvolve(b_coef, i1)[:m]
    return out


def _distorted_positive_values(gt: np.ndarray, grid: np.ndarray,
                               alpha: float) -> np.ndarray:
    """G(t) = (t / Gamma(1+alpha)) * int_0^1 (1 - Gt(t (1-r)**alpha)) a r^(a-1) dr.

    Substituting w = 1 - r gives the weight a (1-w)**(a-1) dw against
    psi(w) = 1 - Gt(t w**alpha), which is product-integrated with
    piecewise-linear psi on a uniform w grid.
    """
    m_w = 4096
    w_nodes = np.linspace(0.0, 1.0, m_w + 1)
    hw = 1.0 / m_w
    # exact moments of a*(1-w)**(a-1) over each w cell, against 1 and (w - w_j)
    d1 = 1.0 - w_nodes[:-1]
    d0 = 1.0 - w_nodes[1:]
    j0 = d1**alpha - d0**alpha
    j1 = (d1 ** (alpha + 1.0) - d0 ** (alpha + 1.0)) / (alpha + 1.0) - d0**alpha * hw
    # j1 above: int (w - w_j) a (1-w)^(a-1) dw over [w_j, w_j + hw]
    out = np.empty_like(grid)
    out[0] = 0.0
    g1a = gamma_fn(1.0 + alpha)
    for i, t in enumerate(grid[1:], start=1):
        psi = 1.0 - np.interp(t * w_nodes**alpha, grid, gt)
        a_coef = psi[:-1]
        b_coef = np.diff(psi) / hw
        out[i] = (t / g1a) * float(np.dot(a_coef, j0) + np.dot(b_coef, j1))
    return out


def forward(spec: TransformSpec, law: SubDistribution) -> SubDistribution:
    """Apply the forward (return -> hitting) transform on the law's grid."""
    grid = law.grid
    ft = law.values
    if spec.kind == "distorted_zero":
        raw = grid * (1.0 - ft)
    elif spec.kind == "distorted_positive":
        _uniform_h(grid)
        raw = _distorted_positive_values(ft, grid, spec.alpha)
    else:
        alpha = 1.0 if spec.kind == "hlv" else spec.alpha
        h = _uniform_h(grid)
        raw = _forward_values(ft, alpha, h)
    vals = np.clip(raw, 0.0, 1.0)
    return SubDistribution(grid=grid, values=vals,
                           repair=float(np.max(np.abs(vals - raw))))


def invert(spec: TransformSpec, law: SubDistribution) -> SubDistribution:
    """Recover the return-time law from a hitting-time law.

    Solves the forward discretization exactly by forward substitution; the
    first node pins 1 - Ft(0) = 1 (return times are positive).  The result
    is clamped to [0, 1] and re-monotonized, with the total adjustment
    reported in ``repair``.
    """
    if spec.kind not in ("hlv", "fractional"):
        raise ValueError(f"inversion is defined for 'hlv'/'fractional', not {spec.kind!r}")
    grid = law.grid
    f = law.values
    if abs(f[0]) > 1e-6:
        raise ValueError(f"input must vanish at t=0, got F(0)={f[0]!r}")
    alpha = 1.0 if spec.kind == "hlv" else spec.alpha
    h = _uniform_h(grid)
    m = len(grid) - 1
    i0, i1 = _kernel_moments(alpha, h, m)
    # unknowns u_j ~ 1 - Ft(t_j); cell j contributes u_j*i0[lag] + (u_{j+1}-u_j)/h*i1[lag]
    i1h = i1 / h
    c_lead = i1h[0]  # coefficient of the newest unknown (nonzero for h > 0)
    c_self = i0 - i1h  # coefficient of u_j as the left node of cell j
    u = np.empty(m + 1)
    u[0] = 1.0
    for k in range(1, m + 1):
        acc = float(np.dot(u[:k], c_self[k - 1 :: -1]))
        if k > 1:
            # u_j as the right node of cell j-1, lag k - (j-1)
            acc += float(np.dot(u[1:k], i1h[k - 1 : 0 : -1]))
        u[k] = (f[k] - acc) / c_lead
    ft_raw = 1.0 - u
    clipped = np.clip(ft_raw, 0.0, 1.0)
    mon = np.maximum.accumulate(clipped)
    repair = float(np.max(np.abs(mon - ft_raw)))
    return SubDistribution(grid=grid, values=mon, repair=repair)


def change_of_variables(law: SubDistribution, alpha: float,
                        direction: str) -> SubDistribution:
    """Reparametrize the abscissa between plain and distorted time.

    direction "to_distorted" maps node t to t**alpha (values unchanged);
    "from_distorted" applies the inverse map t -> t**(1/alpha).
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {alpha}")
    if direction not in ("to_distorted", "from_distorted"):
        raise ValueError(f"unknown direction {direction!r}")
    p = alpha if direction == "to_distorted" else 1.0 / alpha
    return SubDistribution(grid=law.grid**p, values=law.values.copy(),
                           sample_count=law.sample_count,
                           censored_count=law.censored_count)


def resample(law: SubDistribution, grid) -> SubDistribution:
    """Linear resampling onto a new grid (used after change_of_variables)."""
    grid = np.asarray(grid, dtype=float)
    return SubDistribution(grid=grid, values=law.at(grid),
                           sample_count=law.sample_count,
                           censored_count=law.censored_count)


def fixed_point(alpha: float, grid, tol: float = 1e-6, refine: int = 4,
                max_iter: int = 10_000) -> SubDistribution:
    """Fixed point of the fractional forward map, iterated from the zero law.

    The iteration runs on an internally ``refine``-times finer grid (the
    kernel's weak singularity makes the discretization error at step h
    scale like h**(1+alpha)); the returned law is tabulated on ``grid``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {alpha}")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    grid = np.asarray(grid, dtype=float)
    h = _uniform_h(grid) / refine
    m = (len(grid) - 1) * refine
    fine = np.linspace(0.0, grid[-1], m + 1)
    f = np.zeros(m + 1)
    for _ in range(max_iter):
        nxt = np.clip(_forward_values(f, alpha, h), 0.0, 1.0)
        delta = float(np.max(np.abs(nxt - f)))
        f = nxt
        if delta < tol:
            break
    else:
        raise RuntimeError(
            f"no fixed point after {max_iter} iterations (last change {delta:.3g}); "
            "check the grid resolution"
        )
    return SubDistribution(grid=grid, values=np.maximum.accumulate(f[::refine]))
