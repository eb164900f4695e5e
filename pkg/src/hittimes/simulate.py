"""Monte Carlo estimation of normalized return- and hitting-time laws.

Samples are capped at a configurable number of steps; samples that do not
land in the target within the cap are *censored* and contribute no mass to
the estimated CDF, which is therefore a sub-probability distribution.
Exact distributional shortcuts replace step-by-step iteration where the
system structure allows it (renewal tower, dyadic targets); Boole's map is
iterated with a compiled kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import systems as sysmod
from ._kernels import boole_hit_times
from .systems import (
    BooleMap,
    DoublingMap,
    DyadicInterval,
    FiniteMarkovShift,
    IntervalInY,
    LabelInterval,
    RenewalTower,
    ShortReturnColumn,
)

__all__ = [
    "SubDistribution",
    "ReturnSampleBatch",
    "default_grid",
    "first_return_time",
    "estimate_batch",
    "estimate_cdf",
    "estimate_tails_and_wandering",
    "ks_distance",
]

DEFAULT_T_MAX = 10.0
DEFAULT_H = 1.0 / 512.0


def default_grid(t_max: float = DEFAULT_T_MAX, h: float = DEFAULT_H) -> np.ndarray:
    """Uniform evaluation grid 0, h, 2h, ..., t_max."""
    m = int(round(t_max / h))
    return np.linspace(0.0, m * h, m + 1)


@dataclass(frozen=True)
class SubDistribution:
    """A sub-probability CDF tabulated on an increasing grid with t_0 = 0.

    ``total_mass + censored_count / sample_count = 1`` for empirical
    instances; analytic instances carry zero counts.  Values between nodes
    are interpreted by linear interpolation throughout the package.

    Empirical constructors always produce non-decreasing values.  Analytic
    transform output is only required to stay in [0, 1]: the fractional
    forward map of a light-tailed input legitimately decays back toward 0,
    and flattening it would break the exactness of the inverse transform.
    Use ``is_monotone`` to check before treating values as a CDF.
    """

    grid: np.ndarray
    values: np.ndarray
    sample_count: int = 0
    censored_count: int = 0
    # magnitude of any clipping/re-monotonization applied by a transform
    repair: float = 0.0

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or len(g) < 2:
            raise ValueError("grid and values must be 1-d arrays of equal length >= 2")
        if g[0] != 0.0 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must start at 0 and be strictly increasing")
        if v.min() < -1e-12 or v.max() > 1.0 + 1e-12:
            raise ValueError("values must lie within [0, 1]")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def total_mass(self) -> float:
        return float(self.values[-1])

    @property
    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) >= -1e-12))

    @property
    def censored_fraction(self) -> float:
        return self.censored_count / self.sample_count if self.sample_count else 0.0

    def at(self, t):
        """Linear interpolation; constant continuation beyond the last node."""
        return np.interp(np.asarray(t, dtype=float), self.grid, self.values)

    @classmethod
    def from_samples(cls, normalized, grid, censored_count: int = 0) -> "SubDistribution":
        """Empirical CDF of finite sample values; +inf entries are censored."""
        v = np.asarray(normalized, dtype=float)
        n = len(v) + censored_count
        finite = np.sort(v[np.isfinite(v)])
        censored = n - len(finite)
        values = np.searchsorted(finite, grid, side="right") / n
        return cls(grid=np.asarray(grid, float), values=values,
                   sample_count=n, censored_count=censored)

    @classmethod
    def from_cdf(cls, fn, grid) -> "SubDistribution":
        grid = np.asarray(grid, dtype=float)
        return cls(grid=grid, values=np.asarray(fn(grid), dtype=float))


@dataclass(frozen=True)
class ReturnSampleBatch:
    """Raw first-passage times with their normalization and provenance.

    ``phi`` holds positive step counts, with 0 flagging censored samples.
    """

    phi: np.ndarray
    cap: int
    normalizer: object
    mu_e: float
    norm_description: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        phi = np.asarray(self.phi, dtype=np.int64)
        if np.any(phi < 0) or np.any((phi > self.cap) & (phi != 0)):
            raise ValueError("uncensored return times must lie in [1, cap]")
        object.__setattr__(self, "phi", phi)

    @property
    def censored(self) -> np.ndarray:
        return self.phi == 0

    def normalized(self) -> np.ndarray:
        """Normalized values, +inf for censored samples."""
        out = np.asarray(self.normalizer.normalize(self.phi, self.mu_e), dtype=float)
        out[self.censored] = np.inf
        return out

    def to_subdistribution(self, grid) -> SubDistribution:
        vals = self.normalized()
        return SubDistribution.from_samples(vals[np.isfinite(vals)], grid,
                                            censored_count=int(self.censored.sum()))


# ---------------------------------------------------------------------------
# generic stepping


def first_return_time(sys, target, start, cap: int, rng=None) -> Optional[int]:
    """Least n in [1, cap] with T^n(start) in the target, else None (censored)."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    state = start
    for n in range(1, cap + 1):
        state = sysmod.step(sys, state, rng)
        if sysmod.in_target(sys, target, state):
            return n
    return None


# ---------------------------------------------------------------------------
# batch samplers (exact in law, vectorized)


def _clipped_excursions(sys: RenewalTower, rng, size: int, cap: int) -> np.ndarray:
    ell = sys.draw_excursions(rng, size)
    return np.minimum(ell, cap + 1)


def _geometric_sums(sys: RenewalTower, p: float, counts: np.ndarray, rng,
                    cap: int, draws_per_chunk: int = 4_000_000) -> np.ndarray:
    """Sum of ``counts[i]`` i.i.d. excursion lengths per sample.

    Samples are processed in groups of at most ``draws_per_chunk`` draws so
    peak memory stays bounded regardless of the total count.  Per-sample
    sums are clipped at cap + 1 (anything beyond is censored anyway).
    """
    counts = np.asarray(counts, dtype=np.int64)
    out = np.zeros(len(counts), dtype=np.int64)
    todo = np.where(counts > 0)[0]
    if not len(todo):
        return out
    # cap each count: a sample needing more than cap+1 unit-length excursions
    # is censored no matter what the remaining draws are
    capped = np.minimum(counts[todo], cap + 1)
    bounds = np.searchsorted(np.cumsum(capped), np.arange(
        draws_per_chunk, int(capped.sum()) + draws_per_chunk, draws_per_chunk))
    start = 0
    for stop in np.minimum(bounds + 1, len(todo)):
        if stop <= start:
            continue
        idx = todo[start:stop]
        c = capped[start:stop]
        draws = _clipped_excursions(sys, rng, int(c.sum()), cap)
        cuts = np.concatenate(([0], np.cumsum(c)[:-1]))
        out[idx] = np.minimum(np.add.reduceat(draws, cuts), cap + 1)
        start = stop
    return out


def _tower_label_phis(sys: RenewalTower, target: LabelInterval, n: int, cap: int,
                      rng) -> np.ndarray:
    """phi = sum of M excursion lengths, M geometric(p): the first passage to
    a base visit whose freshly drawn label falls in the target interval.
    The law is the same from mu_E and mu_Y starts (labels are redrawn at
    every base visit)."""
    phis = np.empty(n, dtype=np.int64)
    # keep the number of excursion draws per chunk near 4e6
    chunk = max(256, min(n, int(4e6 * target.p) + 1))
    for i in range(0, n, chunk):
        m = rng.geometric(target.p, min(chunk, n - i))
        phis[i : i + len(m)] = _geometric_sums(sys, target.p, m, rng, cap)
    phis[phis > cap] = 0
    return phis


def _tower_column_return_phis(sys: RenewalTower, target: ShortReturnColumn, n: int,
                              cap: int, rng) -> np.ndarray:
    """Exact return times from mu_E for the short-return column.

    From level j with label < width and residual excursion length L (law of
    L given L > j): if the excursion continues below the top of the column
    the orbit is back in the set after one step; otherwise it reaches the
    base after L - j steps and waits for the first fresh base label < width
    (geometric), accumulating full excursions in between.
    """
    d, w = target.depth, target.width
    q = sys.excursion_tail(np.arange(d))
    lev = rng.choice(d, size=n, p=q / q.sum())
    length = np.minimum(sys.draw_residual_excursions(lev.astype(float), rng),
                        np.int64(cap) + lev + 1)
    phi = np.zeros(n, dtype=np.int64)
    quick = (length - lev >= 2) & (lev + 1 < d)
    phi[quick] = 1
    rest = ~quick
    to_base = (length - lev)[rest]
    m = rng.geometric(w, int(rest.sum()))
    phi[rest] = to_base + _geometric_sums(sys, w, m - 1, rng, cap)
    phi[phi > cap] = 0
    return phi


def _tower_column_hit_phis(sys: RenewalTower, target: ShortReturnColumn, n: int,
                           cap: int, rng) -> np.ndarray:
    """Exact hitting times from mu_Y for the short-return column."""
    d, w = target.depth, target.width
    u0 = rng.random(n)
    first = _clipped_excursions(sys, rng, n, cap)
    phi = np.zeros(n, dtype=np.int64)
    # a base label already below the width climbs into the column in one step
    quick = (u0 < w) & (first >= 2)
    phi[quick] = 1
    rest = ~quick
    m = rng.geometric(w, int(rest.sum()))
    phi[rest] = first[rest] + _geometric_sums(sys, w, m - 1, rng, cap)
    phi[phi > cap] = 0
    return phi


def _doubling_dyadic_phis(target: DyadicInterval, n: int, cap: int, rng,
                          from_target: bool) -> np.ndarray:
    """First-passage times to a dyadic interval under the doubling map.

    In binary the orbit of a Lebesgue point is an i.i.d. fair bit stream,
    and membership of T^n(x) in the target means bits n..n+k-1 equal the
    anchor pattern.  Trajectories are scanned stage by stage, carrying the
    last k-1 bits across stage boundaries so each sample sees one
    uninterrupted stream.
    """
    k = target.level
    pattern = target.anchor_bits
    stage = min(cap + k, max(16 * 2**k, 4096))
    chunk = max(64, int(5e6) // stage)
    if n > chunk:
        return np.concatenate([
            _doubling_dyadic_phis(target, min(chunk, n - i), cap, rng, from_target)
            for i in range(0, n, chunk)
        ])
    phis = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    carry = None  # (len(active), k-1) bits continuing each stream
    offset = 0  # absolute time of the first window in the current stage
    anchor_prefix = np.array(
        [(pattern >> (k - 1 - j)) & 1 for j in range(k)], dtype=np.uint8
    )
    while len(active) and offset <= cap:
        fresh = rng.integers(0, 2, size=(len(active), stage), dtype=np.uint8)
        if offset == 0 and from_target:
            fresh[:, :k] = anchor_prefix
        bits = fresh if carry is None else np.concatenate([carry, fresh], axis=1)
        nwin = bits.shape[1] - k + 1
        w = np.zeros((len(active), nwin), dtype=np.uint64)
        for j in range(k):
            w += bits[:, j : j + nwin].astype(np.uint64) << np.uint64(k - 1 - j)
        match = w == pattern
        if offset == 0:
            match[:, 0] = False  # the passage time starts at n = 1
        hit = match.any(axis=1)
        when = offset + np.argmax(match, axis=1)
        found = hit & (when <= cap)
        phis[active[found]] = when[found]
        cont = ~found & (offset + nwin <= cap)
        active = active[cont]
        carry = bits[cont, -(k - 1) :] if k > 1 else None
        offset += nwin
    return phis


def _markov_hit_phis(sys: FiniteMarkovShift, targets: np.ndarray, starts: np.ndarray,
                     cap: int, rng) -> np.ndarray:
    cum = np.cumsum(sys.transition, axis=1)
    state = starts.copy()
    phi = np.zeros(len(starts), dtype=np.int64)
    alive = np.arange(len(starts))
    for step_i in range(1, cap + 1):
        u = rng.random(len(alive))
        state = np.array([np.searchsorted(cum[s], x) for s, x in zip(state, u)])
        hit = targets[state]
        phi[alive[hit]] = step_i
        alive = alive[~hit]
        state = state[~hit]
        if not len(alive):
            break
    return phi


# ---------------------------------------------------------------------------
# estimation entry points


def estimate_batch(sys, target, start_law: str, normalizer, n_samples: int,
                   cap: int, seed, use_stepping: bool = False) -> ReturnSampleBatch:
    """Draw ``n_samples`` first-passage times and attach their normalization.

    ``start_law`` is "muE" (return times) or "muY" (hitting times).
    ``use_stepping`` forces the generic one-step-at-a-time simulator (slow;
    for validating the distributional shortcuts).
    """
    if start_law not in ("muE", "muY"):
        raise ValueError(f"start_law must be 'muE' or 'muY', got {start_law!r}")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    mu_e = sysmod.measure_of_target(sys, target)
    if mu_e <= 0:
        raise ValueError("target has zero measure")
    rng = np.random.default_rng(seed)

    if use_stepping:
        phis = np.zeros(n_samples, dtype=np.int64)
        for i in range(n_samples):
            start = (sysmod.sample_muE(sys, target, rng)
                     if start_law == "muE" else sysmod.sample_muY(sys, rng))
            phis[i] = first_return_time(sys, target, start, cap, rng) or 0
    elif isinstance(sys, RenewalTower) and isinstance(target, LabelInterval):
        phis = _tower_label_phis(sys, target, n_samples, cap, rng)
    elif isinstance(sys, RenewalTower) and isinstance(target, ShortReturnColumn):
        if start_law == "muE":
            phis = _tower_column_return_phis(sys, target, n_samples, cap, rng)
        else:
            phis = _tower_column_hit_phis(sys, target, n_samples, cap, rng)
    elif isinstance(sys, BooleMap) and isinstance(target, IntervalInY):
        starts = (sysmod.sample_muE(sys, target, rng, n_samples)
                  if start_law == "muE" else sysmod.sample_muY(sys, rng, n_samples))
        phis = boole_hit_times(starts, target.center - target.half_width,
                               target.center + target.half_width, cap)
    elif isinstance(sys, DoublingMap) and isinstance(target, DyadicInterval):
        phis = _doubling_dyadic_phis(target, n_samples, cap, rng,
                                     from_target=(start_law == "muE"))
    else:
        raise TypeError(
            f"no sampler for {type(sys).__name__} with {type(target).__name__}"
        )

    if getattr(normalizer, "normalize", None) is None:
        raise TypeError("normalizer must provide a .normalize(phi, mu_e) method")
    return ReturnSampleBatch(
        phi=phis,
        cap=cap,
        normalizer=normalizer,
        mu_e=mu_e,
        norm_description=normalizer.describe(mu_e),
        provenance={
            "system": type(sys).__name__,
            "target": repr(target),
            "start_law": start_law,
            "seed": seed,
            "cap": cap,
            "mu_E": mu_e,
        },
    )


def estimate_cdf(sys, target, start_law: str, normalizer, n_samples: int, cap: int,
                 grid, seed, use_stepping: bool = False) -> SubDistribution:
    """Empirical sub-probability CDF of the normalized first-passage time."""
    batch = estimate_batch(sys, target, start_law, normalizer, n_samples, cap, seed,
                           use_stepping=use_stepping)
    return batch.to_subdistribution(np.asarray(grid, dtype=float))


def estimate_tails_and_wandering(sys, n_max: int, n_samples: int, seed):
    """Estimate q_n = mu_Y(return to Y > n) for n = 1..n_max and the
    wandering rate w_N = mu(Y) * sum_{n<N} q_n (with q_0 = 1)."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    rng = np.random.default_rng(seed)
    if isinstance(sys, RenewalTower):
        phi = np.minimum(sys.draw_excursions(rng, n_samples), n_max + 1)
    elif isinstance(sys, BooleMap):
        starts = sysmod.sample_muY(sys, rng, n_samples)
        phi = boole_hit_times(starts, -1.0, 1.0, n_max)
        phi = np.where(phi == 0, n_max + 1, phi)
    elif isinstance(sys, DoublingMap):
        phi = np.ones(n_samples, dtype=np.int64)  # Y is the whole space
    elif isinstance(sys, FiniteMarkovShift):
        in_y = np.zeros(len(sys.transition), dtype=bool)
        in_y[list(sys.y_states)] = True
        starts = sysmod.sample_muY(sys, rng, n_samples)
        phi = _markov_hit_phis(sys, in_y, starts, n_max, rng)
        phi = np.where(phi == 0, n_max + 1, phi)
    else:
        raise TypeError(f"unknown system {type(sys).__name__}")

    counts = np.bincount(np.minimum(phi, n_max + 1), minlength=n_max + 2)
    exceed = n_samples - np.cumsum(counts)  # exceed[n] = #{phi > n}
    q = exceed[1 : n_max + 1] / n_samples
    w = sys.mu_Y * (1.0 + np.concatenate(([0.0], np.cumsum(q[:-1]))))
    return q, w


def ks_distance(f: SubDistribution, g, t_max: Optional[float] = None) -> float:
    """Sup distance between two tabulated laws (or a law object) over the
    union of their grids, optionally restricted to [0, t_max]."""
    if isinstance(g, SubDistribution):
        grid = np.union1d(f.grid, g.grid)
        gv = g.at(grid)
    else:
        grid = f.grid
        gv = np.asarray(g.cdf(grid), dtype=float)
    fv = f.at(grid)
    if t_max is not None:
        keep = grid <= t_max
        fv, gv = fv[keep], gv[keep]
    return float(np.max(np.abs(fv - gv)))
