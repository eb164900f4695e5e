"""Concrete measure-preserving systems with reference sets and shrinking targets.

Four model systems:

* ``RenewalTower(alpha)`` — a tower over a base of measure 1 with excursion
  lengths L >= 1 distributed as Pr[L > n] = (1+n)**(-alpha); infinite
  invariant measure for alpha < 1 (and for alpha = 1, barely).
* ``BooleMap`` — x -> x - 1/x on the real line, preserving Lebesgue measure
  (infinite); reference set Y = [-1, 1].
* ``DoublingMap`` — x -> 2x mod 1 on [0, 1] with Lebesgue measure (finite).
* ``FiniteMarkovShift`` — an irreducible finite Markov chain in its
  stationary measure (finite), mainly for exact operator identities.

Targets are small subsets of (or columns over) the reference set Y whose
measure shrinks along a sequence index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.special import gamma as gamma_fn

from .scaling import ScalingFunction

__all__ = [
    "RenewalTower",
    "BooleMap",
    "DoublingMap",
    "FiniteMarkovShift",
    "TowerState",
    "LabelInterval",
    "IntervalInY",
    "ShortReturnColumn",
    "DyadicInterval",
    "step",
    "sample_muY",
    "sample_muE",
    "measure_of_target",
    "known_scaling",
    "in_target",
]

# anchor for dyadic targets: binary digits of sqrt(2) - 1, an irrational
# (hence aperiodic) point -- anchoring at 0 would put the fixed point of the
# doubling map inside every target
DYADIC_ANCHOR = math.sqrt(2.0) - 1.0


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class RenewalTower:
    """Tower with excursion tail Q(n) = (1+n)**(-alpha), base of measure 1."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"tail exponent must lie in (0, 1], got {self.alpha}")

    mu_Y: float = 1.0
    total_measure: Optional[float] = None  # infinite

    def excursion_tail(self, n) -> np.ndarray:
        """Q(n) = Pr[L > n]."""
        return (1.0 + np.asarray(n, dtype=float)) ** (-self.alpha)

    def draw_excursions(self, rng: np.random.Generator, size) -> np.ndarray:
        """Exact excursion lengths by inversion: L = floor(U**(-1/alpha)) >= 1.

        Values are clipped to 2**62 before the integer cast; any excursion
        that long is censored by every practical cap anyway.
        """
        u = rng.random(size)
        with np.errstate(over="ignore"):
            v = u ** (-1.0 / self.alpha)
        return np.minimum(v, 2.0**62).astype(np.int64)

    def draw_residual_excursions(self, level, rng: np.random.Generator) -> np.ndarray:
        """Draw L conditioned on L > level: floor((1+level) * U**(-1/alpha))."""
        level = np.asarray(level, dtype=float)
        u = rng.random(level.shape)
        with np.errstate(over="ignore"):
            v = (1.0 + level) * u ** (-1.0 / self.alpha)
        return np.minimum(v, 2.0**62).astype(np.int64)


@dataclass(frozen=True)
class BooleMap:
    """x -> x - 1/x; Lebesgue-invariant on the line, Y = [-1, 1]."""

    mu_Y: float = 2.0
    total_measure: Optional[float] = None  # infinite
    alpha: float = 0.5


@dataclass(frozen=True)
class DoublingMap:
    """x -> 2x mod 1 on [0, 1); Lebesgue probability measure, Y = X."""

    mu_Y: float = 1.0
    total_measure: Optional[float] = 1.0
    alpha: float = 1.0


@dataclass(frozen=True)
class FiniteMarkovShift:
    """Irreducible finite-state chain in its stationary law.

    ``y_states`` selects the reference set Y; the invariant probability
    vector is computed at construction.
    """

    transition: np.ndarray
    y_states: Tuple[int, ...]
    stationary: np.ndarray = field(init=False, repr=False)
    alpha: float = 1.0

    def __post_init__(self) -> None:
        p = np.asarray(self.transition, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("transition matrix must be square")
        if np.any(p < 0) or not np.allclose(p.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("transition matrix must be row-stochastic")
        object.__setattr__(self, "transition", p)
        if not self.y_states or not set(self.y_states) <= set(range(len(p))):
            raise ValueError("y_states must be a nonempty subset of the state space")
        # stationary vector: left eigenvector for eigenvalue 1
        vals, vecs = np.linalg.eig(p.T)
        i = int(np.argmin(np.abs(vals - 1.0)))
        pi = np.real(vecs[:, i])
        pi = pi / pi.sum()
        if np.any(pi <= 0):
            raise ValueError("chain is not irreducible (stationary vector has zeros)")
        object.__setattr__(self, "stationary", pi)

    @property
    def mu_Y(self) -> float:
        return float(self.stationary[list(self.y_states)].sum())

    @property
    def total_measure(self) -> float:
        return 1.0

    def adjoint_matrix(self) -> np.ndarray:
        """Matrix M of the transfer operator: (M f)(y) = sum_x pi(x) P(x,y) f(x) / pi(y)."""
        pi = self.stationary
        return (self.transition * pi[:, None]).T / pi[:, None]


# tower state: position inside the current excursion
@dataclass(frozen=True)
class TowerState:
    level: int  # 0 = base
    remaining: int  # steps left until the next base visit (0 at base)
    label: float  # uniform mark attached at the last base visit


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class LabelInterval:
    """Base points of the tower with label in [offset, offset + p)."""

    p: float
    offset: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"label width must lie in (0, 1], got {self.p}")
        if self.offset < 0.0 or self.offset + self.p > 1.0:
            raise ValueError("label interval must fit inside [0, 1]")


@dataclass(frozen=True)
class IntervalInY:
    """Interval [center - half_width, center + half_width] inside Y."""

    center: float
    half_width: float

    def __post_init__(self) -> None:
        if not self.half_width > 0.0:
            raise ValueError("half width must be positive")


@dataclass(frozen=True)
class ShortReturnColumn:
    """Tower levels 0..depth-1 restricted to labels in [0, width).

    Points inside the column mostly step straight up to the next level and
    therefore return to the set in a single step; the set's measure is
    width * sum_{j<depth} Q(j).
    """

    depth: int
    width: float

    def __post_init__(self) -> None:
        if self.depth < 2:
            raise ValueError("column depth must be at least 2")
        if not 0.0 < self.width <= 1.0:
            raise ValueError("column width must lie in (0, 1]")


@dataclass(frozen=True)
class DyadicInterval:
    """Dyadic interval of length 2**-level anchored at an irrational point."""

    level: int

    def __post_init__(self) -> None:
        if not 1 <= self.level <= 52:
            raise ValueError("dyadic level must lie in [1, 52]")

    @property
    def anchor_bits(self) -> int:
        """First ``level`` binary digits of the anchor, as an integer."""
        return int(DYADIC_ANCHOR * 2**self.level)

    @property
    def left(self) -> float:
        return self.anchor_bits / 2.0**self.level


# ---------------------------------------------------------------------------
# operations


def step(sys, state, rng: Optional[np.random.Generator] = None):
    """Apply the map once.  Symbolic systems consume randomness lazily."""
    if isinstance(sys, BooleMap):
        x = float(state)
        if x == 0.0:
            x = 1e-300  # measure-zero singular point
        return x - 1.0 / x
    if isinstance(sys, DoublingMap):
        return (2.0 * float(state)) % 1.0
    if isinstance(sys, RenewalTower):
        if rng is None:
            raise ValueError("tower stepping requires an rng handle")
        if state.level > 0:
            if state.remaining > 1:
                return TowerState(state.level + 1, state.remaining - 1, state.label)
            return TowerState(0, 0, float(rng.random()))  # label redrawn at the base
        # at the base: start a fresh excursion, keeping the base label aloft
        length = int(sys.draw_excursions(rng, ()))
        if length >= 2:
            return TowerState(1, length - 1, state.label)
        return TowerState(0, 0, float(rng.random()))
    if isinstance(sys, FiniteMarkovShift):
        if rng is None:
            raise ValueError("markov stepping requires an rng handle")
        row = sys.transition[int(state)]
        return int(rng.choice(len(row), p=row))
    raise TypeError(f"unknown system {type(sys).__name__}")


def sample_muY(sys, rng: np.random.Generator, size=None):
    """Sample the normalized invariant measure restricted to Y."""
    if isinstance(sys, BooleMap):
        return rng.uniform(-1.0, 1.0, size)
    if isinstance(sys, DoublingMap):
        return rng.random(size)
    if isinstance(sys, RenewalTower):
        if size is None:
            return TowerState(0, 0, float(rng.random()))
        return [TowerState(0, 0, float(u)) for u in rng.random(size)]
    if isinstance(sys, FiniteMarkovShift):
        ys = np.array(sys.y_states)
        w = sys.stationary[ys]
        out = rng.choice(ys, size=size, p=w / w.sum())
        return int(out) if size is None else out
    raise TypeError(f"unknown system {type(sys).__name__}")


def sample_muE(sys, target, rng: np.random.Generator, size=None):
    """Sample the invariant measure conditioned on the target set."""
    if measure_of_target(sys, target) <= 0.0:
        raise ValueError("target has zero measure")
    if isinstance(sys, RenewalTower) and isinstance(target, LabelInterval):
        u = rng.uniform(target.offset, target.offset + target.p, size)
        if size is None:
            return TowerState(0, 0, float(u))
        return [TowerState(0, 0, float(v)) for v in u]
    if isinstance(sys, RenewalTower) and isinstance(target, ShortReturnColumn):
        q = sys.excursion_tail(np.arange(target.depth))
        lev = rng.choice(target.depth, size=size, p=q / q.sum())
        lab = rng.uniform(0.0, target.width, size)
        if size is None:
            # remaining time inside the current excursion, conditioned on L > level
            length = int(sys.draw_residual_excursions(np.asarray(float(lev)), rng))
            rem = int(length) - int(lev) if int(lev) > 0 else 0
            return TowerState(int(lev), rem, float(lab))
        lengths = sys.draw_residual_excursions(lev.astype(float), rng)
        return [
            TowerState(int(j), int(n) - int(j) if int(j) > 0 else 0, float(u))
            for j, n, u in zip(lev, lengths, lab)
        ]
    if isinstance(sys, BooleMap) and isinstance(target, IntervalInY):
        return rng.uniform(target.center - target.half_width,
                           target.center + target.half_width, size)
    if isinstance(sys, DoublingMap) and isinstance(target, DyadicInterval):
        return target.left + rng.random(size) / 2.0**target.level
    raise TypeError(
        f"target {type(target).__name__} not supported on {type(sys).__name__}"
    )


def measure_of_target(sys, target) -> float:
    """Exact invariant measure of the target set."""
    if isinstance(sys, RenewalTower) and isinstance(target, LabelInterval):
        return target.p
    if isinstance(sys, RenewalTower) and isinstance(target, ShortReturnColumn):
        q = sys.excursion_tail(np.arange(target.depth))
        return float(target.width * q.sum())
    if isinstance(sys, BooleMap) and isinstance(target, IntervalInY):
        return 2.0 * target.half_width
    if isinstance(sys, DoublingMap) and isinstance(target, DyadicInterval):
        return 2.0**-target.level
    raise TypeError(
        f"target {type(target).__name__} not supported on {type(sys).__name__}"
    )


def known_scaling(sys) -> Optional[ScalingFunction]:
    """Analytically derived return-time scaling, normalized so that the
    empirical laws of gamma(mu(E)) * phi converge to the H/exponential
    limit laws (coefficient convention validated against simulation)."""
    if isinstance(sys, RenewalTower):
        if sys.alpha == 1.0:
            # w_N grows like log N; a_n ~ n / log n
            return ScalingFunction(c=1.0, alpha=1.0, beta=-1.0)
        # w_N ~ N**(1-alpha)/(1-alpha)  =>  c = (1-alpha)/Gamma(2-alpha) = 1/Gamma(1-alpha)
        return ScalingFunction(c=1.0 / gamma_fn(1.0 - sys.alpha), alpha=sys.alpha)
    if isinstance(sys, BooleMap):
        # w_N ~ 2 sqrt(2N/pi) for Y=[-1,1]; normalized coefficient 1/sqrt(2 pi)
        return ScalingFunction(c=1.0 / math.sqrt(2.0 * math.pi), alpha=0.5)
    if isinstance(sys, DoublingMap):
        return ScalingFunction(c=1.0, alpha=1.0)
    if isinstance(sys, FiniteMarkovShift):
        return ScalingFunction(c=1.0 / sys.total_measure, alpha=1.0)
    return None


def in_target(sys, target, state) -> bool:
    """Membership test used by the generic stepping simulator."""
    if isinstance(sys, RenewalTower) and isinstance(target, LabelInterval):
        return state.level == 0 and target.offset <= state.label < target.offset + target.p
    if isinstance(sys, RenewalTower) and isinstance(target, ShortReturnColumn):
        return state.level < target.depth and state.label < target.width
    if isinstance(sys, BooleMap) and isinstance(target, IntervalInY):
        return abs(float(state) - target.center) <= target.half_width
    if isinstance(sys, DoublingMap) and isinstance(target, DyadicInterval):
        return int(float(state) * 2**target.level) == target.anchor_bits
    raise TypeError(
        f"target {type(target).__name__} not supported on {type(sys).__name__}"
    )
