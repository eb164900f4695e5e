"""Forward/inverse integral transforms between return and hitting laws."""

import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from hittimes.laws import cdf_G0, cdf_H
from hittimes.simulate import SubDistribution, default_grid
from hittimes.transform import (
    TransformSpec,
    change_of_variables,
    fixed_point,
    forward,
    invert,
    resample,
)


def _exp_cdf(t):
    return 1.0 - np.exp(-np.asarray(t, dtype=float))


def _tab(fn, grid):
    return SubDistribution.from_cdf(fn, grid)


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            TransformSpec(kind="laplace")

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            TransformSpec(kind="fractional", alpha=0.0)
        with pytest.raises(ValueError):
            TransformSpec(kind="fractional", alpha=1.2)
        TransformSpec(kind="hlv")  # alpha ignored

    def test_grid_must_be_uniform(self):
        law = SubDistribution(grid=np.array([0.0, 1.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]),
                              values=np.zeros(8))
        with pytest.raises(ValueError):
            forward(TransformSpec("hlv"), law)

    def test_grid_too_coarse(self):
        law = SubDistribution(grid=np.linspace(0, 1, 4), values=np.zeros(4))
        with pytest.raises(ValueError):
            forward(TransformSpec("hlv"), law)


class TestForwardClosedForms:
    def test_exponential_is_hlv_fixed_point(self):
        # finite-measure forward map: F(t) = int_0^t (1 - Ft); the unit
        # exponential reproduces itself
        grid = default_grid()
        out = forward(TransformSpec("hlv"), _tab(_exp_cdf, grid))
        assert np.max(np.abs(out.values - _exp_cdf(grid))) <= 1e-6

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.75, 1.0])
    def test_zero_input(self, alpha):
        # a law that never returns: the forward output is the primitive of
        # the kernel itself, t^alpha / Gamma(1+alpha), until clipped at 1
        grid = default_grid()
        out = forward(TransformSpec("fractional", alpha), _tab(lambda t: 0.0 * t, grid))
        expect = np.minimum(grid**alpha / gamma_fn(1.0 + alpha), 1.0)
        assert np.max(np.abs(out.values - expect)) <= 1e-10

    def test_instant_return(self):
        # a law with all mass at 0+ makes the integrand vanish identically
        grid = default_grid()
        ones = SubDistribution(grid=grid, values=np.ones(len(grid)))
        out = forward(TransformSpec("fractional", 0.5), ones)
        assert np.max(np.abs(out.values)) == 0.0

    def test_constant_input_tail(self):
        # sup Ft = 0.9 < 1 forces F(t) >= 0.1 t^alpha/Gamma(1+alpha):
        # the hitting law cannot saturate if returns miss mass
        alpha = 0.5
        grid = default_grid()
        law = SubDistribution(grid=grid, values=np.full(len(grid), 0.9))
        out = forward(TransformSpec("fractional", alpha), law)
        expect = np.minimum(0.1 * grid**alpha / gamma_fn(1.5), 1.0)
        assert np.max(np.abs(out.values - expect)) <= 1e-10

    def test_g0_is_distorted_zero_fixed_point(self):
        grid = default_grid()
        out = forward(TransformSpec("distorted_zero"), _tab(cdf_G0, grid))
        assert np.max(np.abs(out.values - cdf_G0(grid))) <= 1e-14

    def test_alpha_one_fractional_equals_hlv(self):
        grid = default_grid()
        law = _tab(_exp_cdf, grid)
        a = forward(TransformSpec("fractional", 1.0), law)
        b = forward(TransformSpec("hlv"), law)
        assert np.max(np.abs(a.values - b.values)) <= 1e-12

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0])
    def test_modulus_of_continuity(self, alpha):
        # increments of the output are bounded by those of the kernel primitive
        grid = default_grid()
        h = grid[1] - grid[0]
        out = forward(TransformSpec("fractional", alpha), _tab(_exp_cdf, grid))
        bound = h**alpha / gamma_fn(1.0 + alpha)
        assert np.max(np.abs(np.diff(out.values))) <= bound + 1e-12

    def test_h_alpha_is_fractional_fixed_point(self):
        # F = I^alpha (1 - F) characterizes the hitting limit law
        alpha = 0.5
        grid = default_grid()
        law = _tab(lambda t: cdf_H(alpha, t), grid)
        out = forward(TransformSpec("fractional", alpha), law)
        assert np.max(np.abs(out.values - law.values)) <= 2e-3


class TestInvert:
    def test_rejects_nonzero_at_origin(self):
        grid = default_grid()
        law = SubDistribution(grid=grid, values=np.full(len(grid), 0.5))
        with pytest.raises(ValueError):
            invert(TransformSpec("fractional", 0.5), law)

    def test_rejects_algebraic_kinds(self):
        grid = default_grid()
        law = _tab(lambda t: 0.0 * t, grid)
        with pytest.raises(ValueError):
            invert(TransformSpec("distorted_zero"), law)

    def test_zero_output_inverts_to_instant_return(self):
        grid = default_grid()
        zero = _tab(lambda t: 0.0 * t, grid)
        back = invert(TransformSpec("fractional", 0.5), zero)
        assert np.max(np.abs(back.values[1:] - 1.0)) <= 1e-9

    @pytest.mark.parametrize("kind,alpha", [("hlv", 1.0), ("fractional", 0.3),
                                            ("fractional", 0.5), ("fractional", 0.75)])
    def test_roundtrip_exponential(self, kind, alpha):
        grid = default_grid()
        law = _tab(_exp_cdf, grid)
        out = invert(TransformSpec(kind, alpha), forward(TransformSpec(kind, alpha), law))
        assert np.max(np.abs(out.values - law.values)) <= 1e-9

    def test_roundtrip_random_smooth_laws(self):
        # ten random exponential-mixture CDFs (piecewise-smooth densities)
        rng = np.random.default_rng(6)
        grid = default_grid()
        spec = TransformSpec("fractional", 0.5)
        for _ in range(10):
            k = rng.integers(1, 4)
            w = rng.dirichlet(np.ones(k))
            lam = rng.uniform(0.5, 3.0, size=k)
            f = (w[:, None] * (1.0 - np.exp(-lam[:, None] * grid))).sum(axis=0)
            law = SubDistribution(grid=grid, values=f)
            out = invert(spec, forward(spec, law))
            assert np.max(np.abs(out.values - law.values)) <= 1e-6

    @pytest.mark.parametrize("alpha,tol", [(0.3, 1e-3), (0.5, 1e-3), (0.75, 1e-4)])
    def test_invert_hitting_law_recovers_g_alpha_shape(self, alpha, tol):
        # inverting H_alpha tabulated on a fine grid gives a proper CDF whose
        # forward image reproduces H_alpha; compare on the default grid nodes
        fine = np.linspace(0.0, 10.0, 4096 * 10 + 1)
        law = _tab(lambda t: cdf_H(alpha, t), fine)
        back = invert(TransformSpec("fractional", alpha), law)
        assert back.is_monotone
        assert back.values[-1] <= 1.0
        again = forward(TransformSpec("fractional", alpha), back)
        assert np.max(np.abs(again.values - law.values)) <= tol


class TestDistortedPositive:
    @pytest.mark.parametrize("mk", [
        lambda t: cdf_G0(t),
        lambda t: _exp_cdf(t),
        lambda t: 1.0 - np.exp(-np.asarray(t, dtype=float) ** 1.5 / 2.0),
    ])
    def test_cross_validation_against_fractional_route(self, mk):
        # the w-substitution quadrature must agree with the plain-time route:
        # undistort the abscissa, apply the fractional forward map on a fine
        # uniform grid, and re-distort
        alpha = 0.5
        grid = default_grid()  # distorted time in [0, 10]
        g_in = _tab(mk, grid)
        out = forward(TransformSpec("distorted_positive", alpha), g_in)

        plain = change_of_variables(g_in, alpha, "from_distorted")  # t in [0, 100]
        fine = np.linspace(0.0, 100.0, 819201)
        plain_u = resample(plain, fine)
        f_plain = forward(TransformSpec("fractional", alpha), plain_u)
        ref = change_of_variables(f_plain, alpha, "to_distorted")
        err = np.max(np.abs(out.values - ref.at(grid)))
        assert err <= 1e-4


class TestChangeOfVariables:
    def test_roundtrip(self):
        grid = default_grid()
        law = _tab(_exp_cdf, grid)
        there = change_of_variables(law, 0.5, "to_distorted")
        back = change_of_variables(there, 0.5, "from_distorted")
        assert np.allclose(back.grid, grid, rtol=1e-12)
        assert np.array_equal(back.values, law.values)

    def test_validation(self):
        law = _tab(_exp_cdf, default_grid())
        with pytest.raises(ValueError):
            change_of_variables(law, 1.5, "to_distorted")
        with pytest.raises(ValueError):
            change_of_variables(law, 0.5, "sideways")


def test_resample():
    grid = np.linspace(0, 10, 11)
    law = SubDistribution(grid=grid, values=grid / 10.0)
    out = resample(law, np.linspace(0, 10, 21))
    assert np.allclose(out.values, np.linspace(0, 1, 21))


class TestFixedPoint:
    def test_alpha_one_is_exponential(self):
        grid = default_grid()
        law = fixed_point(1.0, grid)
        assert np.max(np.abs(law.values - _exp_cdf(grid))) <= 1e-3

    def test_validation(self):
        with pytest.raises(ValueError):
            fixed_point(0.0, default_grid())
        with pytest.raises(ValueError):
            fixed_point(0.5, default_grid(), tol=-1.0)
