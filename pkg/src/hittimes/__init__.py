"""Numerical laboratory for return- and hitting-time distributions of
shrinking targets in measure-preserving systems with infinite invariant
measure.

Subpackages:

* ``scaling``   — regularly varying return sequences and the gamma normalization
* ``laws``      — limit laws (H_alpha, G_0, exponential), CDFs and samplers
* ``systems``   — concrete systems (renewal tower, Boole map, doubling map,
  finite Markov shifts) and shrinking-target families
* ``simulate``  — Monte Carlo estimation of normalized first-passage laws
* ``transform`` — forward/inverse return<->hitting integral transforms
* ``verify``    — theorem-level verification procedures
* ``cli``       — command-line front end (``hittimes`` entry point)
"""

from .laws import cdf_G0, cdf_H, exponential, gzero, halpha, LimitLaw, \
    mittag_leffler_neg, sample_H, sample_one_sided_stable
from .scaling import DistortedNormalizer, GammaNormalizer, ScalingFit, \
    ScalingFunction, estimate_return_sequence
from .simulate import SubDistribution, default_grid, estimate_batch, \
    estimate_cdf, estimate_tails_and_wandering, first_return_time, ks_distance
from .systems import BooleMap, DoublingMap, DyadicInterval, FiniteMarkovShift, \
    IntervalInY, LabelInterval, RenewalTower, ShortReturnColumn, known_scaling, \
    measure_of_target, sample_muE, sample_muY, step
from .transform import TransformSpec, change_of_variables, fixed_point, \
    forward, invert, resample
from .verify import VerificationOutcome, check_convergence_to_H, \
    check_decomposition, check_return_vs_hitting, check_robustness

__version__ = "1.0.0"
