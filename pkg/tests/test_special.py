import math

import mpmath
import numpy as np
import pytest

from lnorm.special import digamma, lgamma, lgamma_ratio

EULER_GAMMA = 0.5772156649015329


class TestLgamma:
    def test_against_stdlib(self):
        xs = np.concatenate([
            np.linspace(0.02, 1.0, 60),
            np.linspace(1.0, 50.0, 60),
            np.geomspace(50.0, 1e8, 40),
        ])
        for x in xs:
            assert lgamma(float(x)) == pytest.approx(
                math.lgamma(x), rel=1e-13, abs=1e-13
            )

    def test_against_mpmath(self):
        mpmath.mp.dps = 30
        for x in (0.1, 0.37, 1.5, 9.99, 10.01, 123.456, 1e6 + 0.3):
            want = float(mpmath.loggamma(x))
            assert lgamma(x) == pytest.approx(want, rel=1e-13, abs=1e-13)

    def test_integer_factorials(self):
        assert lgamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
        assert lgamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert lgamma(2.0) == pytest.approx(0.0, abs=1e-14)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            lgamma(0.0)
        with pytest.raises(ValueError):
            lgamma(-2.5)


class TestDigamma:
    def test_psi_one_is_minus_euler_gamma(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-14)

    def test_harmonic_recurrence(self):
        for x in (0.1, 0.9, 3.7, 25.0):
            assert digamma(x + 1.0) - digamma(x) == pytest.approx(1.0 / x, rel=1e-12)

    def test_half_argument_value(self):
        # psi(1/2) = -gamma - 2 log 2
        want = -EULER_GAMMA - 2.0 * math.log(2.0)
        assert digamma(0.5) == pytest.approx(want, abs=1e-13)

    def test_against_mpmath(self):
        mpmath.mp.dps = 30
        for x in (0.2, 1.0, 2.5, 9.5, 10.5, 440.0, 1e7):
            assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), rel=1e-12, abs=1e-13)


class TestLgammaRatio:
    def test_small_arguments_match_direct_difference(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            z = float(rng.uniform(0.5, 40.0))
            a = float(rng.uniform(-0.4, 3.0))
            b = float(rng.uniform(0.1, 3.0))
            if z + a <= 0.05:
                continue
            want = math.lgamma(z + a) - math.lgamma(z + b)
            assert lgamma_ratio(z, a, b) == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_large_argument_stability(self):
        # the naive difference loses ~7 digits at z = 1e6; the combined form
        # must agree with 30-digit arithmetic to ~1e-13 relative.  The sums
        # z+a, z+b are formed in high precision: the ratio is defined at the
        # real arguments, not at their float64 roundings
        mpmath.mp.dps = 30
        for z in (1e4, 1e6, 1e8):
            for a, b in ((0.2, 1.7), (-0.3, 1.1), (0.0, 2.5)):
                want = float(
                    mpmath.loggamma(mpmath.mpf(z) + mpmath.mpf(a))
                    - mpmath.loggamma(mpmath.mpf(z) + mpmath.mpf(b))
                )
                assert lgamma_ratio(z, a, b) == pytest.approx(want, rel=1e-13, abs=1e-13)

    def test_vectorized_matches_scalar(self):
        z = np.array([1.0, 5.0, 9.5, 10.5, 1e5])
        out = lgamma_ratio(z, 0.25, 1.5)
        for zi, oi in zip(z, out):
            assert oi == pytest.approx(lgamma_ratio(float(zi), 0.25, 1.5), rel=1e-15)

    def test_zero_gap(self):
        assert lgamma_ratio(7.3, 1.2, 1.2) == 0.0

    def test_rejects_pole(self):
        with pytest.raises(ValueError):
            lgamma_ratio(1.0, -2.0, 1.0)
