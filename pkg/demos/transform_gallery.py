"""Fixed points and inversion of the return -> hitting integral transform.

Three exact fixed points, one per regime:

  * alpha in (0,1): H_alpha solves F = I^alpha (1 - F)  (fractional kernel);
  * alpha = 1:      the unit exponential solves F(t) = int_0^t (1 - F);
  * alpha = 0:      G_0(t) = t/(1+t) solves the algebraic distorted map
                    G(t) = t (1 - G(t)).

The forward map is then inverted by forward substitution of the same
discretization, which reproduces the input to machine precision.
"""

import numpy as np

from hittimes.laws import cdf_G0, cdf_H
from hittimes.simulate import SubDistribution, default_grid
from hittimes.transform import TransformSpec, fixed_point, forward, invert


def sup(a, b):
    return float(np.max(np.abs(a - b)))


def main():
    grid = default_grid()

    print("== fixed points ==")
    for alpha in (0.3, 0.5, 0.75):
        law = SubDistribution.from_cdf(lambda t: cdf_H(alpha, t), grid)
        out = forward(TransformSpec("fractional", alpha), law)
        print(f"fractional alpha={alpha}: sup |T(H_a) - H_a| = "
              f"{sup(out.values, law.values):.2e}")
    exp_law = SubDistribution.from_cdf(lambda t: 1 - np.exp(-t), grid)
    out = forward(TransformSpec("hlv"), exp_law)
    print(f"finite-measure (alpha=1): sup |T(exp) - exp| = "
          f"{sup(out.values, exp_law.values):.2e}")
    g0 = SubDistribution.from_cdf(cdf_G0, grid)
    out = forward(TransformSpec("distorted_zero"), g0)
    print(f"distorted (alpha=0):      sup |T(G0) - G0| = "
          f"{sup(out.values, g0.values):.2e}")

    print("\n== fixed-point iteration from the zero law ==")
    for alpha in (0.3, 0.5, 0.75, 1.0):
        law = fixed_point(alpha, grid)
        print(f"alpha={alpha}: sup |iterate - H_alpha| = "
              f"{sup(law.values, cdf_H(alpha, grid)):.2e}")

    print("\n== inversion roundtrip ==")
    spec = TransformSpec("fractional", 0.5)
    mix = SubDistribution.from_cdf(
        lambda t: 0.6 * (1 - np.exp(-0.8 * t)) + 0.4 * (1 - np.exp(-2.5 * t)),
        grid)
    back = invert(spec, forward(spec, mix))
    print(f"exponential mixture: sup |invert(forward(F)) - F| = "
          f"{sup(back.values, mix.values):.2e}")


if __name__ == "__main__":
    main()
