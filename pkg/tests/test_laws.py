"""Closed-form and sampling checks for the limit-law catalogue."""

import numpy as np
import pytest
from scipy.special import erfc, erfcx

from hittimes.laws import (
    cdf_G0,
    cdf_H,
    delta_infinity,
    delta_zero,
    exponential,
    gzero,
    halpha,
    mittag_leffler_neg,
    sample_H,
    sample_one_sided_stable,
)


def _ks_empirical(samples, cdf):
    x = np.sort(samples)
    n = len(x)
    f = cdf(x)
    return max(np.max(np.arange(1, n + 1) / n - f), np.max(f - np.arange(n) / n))


class TestMittagLeffler:
    def test_half_order_closed_form(self):
        # E_{1/2}(-x) = erfcx(x) = exp(x^2) erfc(x)
        x = np.linspace(0.0, 50.0, 501)
        assert np.max(np.abs(mittag_leffler_neg(0.5, x) - erfcx(x))) <= 1e-10

    def test_order_one_is_exponential(self):
        x = np.linspace(0.0, 30.0, 301)
        assert np.max(np.abs(mittag_leffler_neg(1.0, x) - np.exp(-x))) <= 1e-12

    def test_series_spectral_continuity(self):
        # the evaluation switches methods along x; the result must be smooth
        for alpha in (0.3, 0.5, 0.75, 0.9):
            x = np.linspace(0.01, 40.0, 4000)
            v = mittag_leffler_neg(alpha, x)
            assert np.all(np.diff(v) < 0)  # strictly decreasing
            assert np.all(v > 0) and np.all(v <= 1)
            # no jumps: successive values on a fine grid stay close
            assert np.max(np.abs(np.diff(v))) < 0.02

    def test_at_zero(self):
        assert mittag_leffler_neg(0.7, 0.0) == pytest.approx(1.0, abs=1e-14)


class TestCdfH:
    def test_half_order_closed_form(self):
        t = np.linspace(0.0, 20.0, 401)
        ref = 1.0 - erfcx(np.sqrt(t))
        assert np.max(np.abs(cdf_H(0.5, t) - ref)) <= 1e-10

    def test_order_one_is_exponential(self):
        t = np.linspace(0.0, 20.0, 401)
        assert np.max(np.abs(cdf_H(1.0, t) - (1.0 - np.exp(-t)))) <= 1e-12

    def test_monotone_proper(self):
        for alpha in (0.3, 0.5, 0.75):
            t = np.linspace(0.0, 200.0, 2001)
            v = cdf_H(alpha, t)
            assert v[0] == pytest.approx(0.0, abs=1e-14)
            assert np.all(np.diff(v) >= -1e-12)
            # heavy tail: H_alpha(t) ~ 1 - 1/(Gamma(1-alpha) t^alpha)
            assert v[-1] > 0.8

    def test_reference_value(self):
        assert cdf_H(0.5, 1.0) == pytest.approx(0.5724, abs=5e-4)


def test_cdf_G0():
    t = np.array([0.0, 0.5, 1.0, 3.0, 1e6])
    assert np.allclose(cdf_G0(t), t / (1.0 + t), atol=1e-15)


class TestStableSampler:
    def test_laplace_transform(self):
        # E exp(-c X) = exp(-c^alpha) for the one-sided alpha-stable law
        rng = np.random.default_rng(7)
        n = 200_000
        for alpha in (0.5, 0.75):
            x = sample_one_sided_stable(alpha, rng, n)
            assert np.all(x > 0)
            v = np.exp(-x)
            se = v.std() / np.sqrt(n)
            assert abs(v.mean() - np.exp(-1.0)) <= 3 * se + 1e-12

    def test_half_order_hitting_mass(self):
        # for alpha=1/2 the stable CDF is erfc(1/(2 sqrt(t)));
        # Pr[X <= 1] = erfc(0.5) ~ 0.4795
        rng = np.random.default_rng(11)
        n = 200_000
        x = sample_one_sided_stable(0.5, rng, n)
        p = np.mean(x <= 1.0)
        se = np.sqrt(p * (1 - p) / n)
        assert abs(p - erfc(0.5)) <= 3 * se

    def test_half_order_cdf(self):
        rng = np.random.default_rng(5)
        x = sample_one_sided_stable(0.5, rng, 100_000)
        d = _ks_empirical(x, lambda t: erfc(1.0 / (2.0 * np.sqrt(t))))
        assert d <= 0.01


class TestSampleH:
    @pytest.mark.parametrize("alpha", [0.5, 0.75])
    def test_matches_cdf(self, alpha):
        rng = np.random.default_rng(13)
        x = sample_H(alpha, rng, 100_000)
        d = _ks_empirical(x, lambda t: cdf_H(alpha, t))
        assert d <= 0.01

    def test_order_one_exponential(self):
        rng = np.random.default_rng(17)
        x = sample_H(1.0, rng, 100_000)
        d = _ks_empirical(x, lambda t: 1.0 - np.exp(-t))
        assert d <= 0.01


class TestLimitLawObjects:
    def test_halpha_wraps_cdf(self):
        law = halpha(0.5)
        assert law.alpha == 0.5
        t = np.linspace(0, 5, 51)
        assert np.allclose(law.cdf(t), cdf_H(0.5, t))
        rng = np.random.default_rng(3)
        assert len(law.sample(rng, 10)) == 10

    def test_gzero(self):
        law = gzero()
        assert law.cdf(1.0) == pytest.approx(0.5)
        t = np.linspace(0, 10, 101)
        assert np.allclose(law.cdf(t), cdf_G0(t))
        rng = np.random.default_rng(3)
        with pytest.raises(ValueError):
            law.sample(rng, 10)

    def test_exponential(self):
        law = exponential()
        assert law.cdf(0.0) == pytest.approx(0.0)
        assert law.cdf(1.0) == pytest.approx(1.0 - np.exp(-1.0))

    def test_degenerate_laws(self):
        t = np.array([0.0, 0.5, 2.0])
        assert np.allclose(delta_zero().cdf(t), 1.0)
        assert np.allclose(delta_infinity().cdf(t), 0.0)
