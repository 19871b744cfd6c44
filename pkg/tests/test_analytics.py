import math

import numpy as np
import pytest
from scipy import integrate

from gsm.analytics.gaussian import (
    BACKWARD_FROM,
    gauss_upper_tail,
    mills_ratio,
    truncated_chi2_upper,
    upper_partial_moments,
)
from gsm.analytics.lemma import lemma1_audit, lemma1_check
from gsm.analytics.moments import (
    ThresholdKind,
    centering_constant,
    hard_moments,
    null_exceedance_probability,
    soft_moments,
    threshold_moment_arrays,
    threshold_moments,
)
from gsm.analytics.oracle import closed_form, oracle_sweep, quad_oracle
from gsm.utils.random import RandomStream
from qfe.constants import ORACLE_RTOL


class TestGaussian:
    def test_tail_and_mills_ratio_at_zero(self):
        assert gauss_upper_tail(0.0) == 0.5
        assert mills_ratio(0.0) == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-15)

    def test_far_tail_does_not_underflow_early(self):
        assert gauss_upper_tail(30.0) > 0.0
        assert mills_ratio(30.0) == pytest.approx(1.0 / 30.0, rel=2e-3)

    def test_partial_moments_at_zero(self):
        j0, j1, j2, j3, j4 = upper_partial_moments(0.0)
        phi0 = 1.0 / math.sqrt(2.0 * math.pi)
        assert j0 == pytest.approx(0.5)
        assert j1 == pytest.approx(phi0)
        assert j2 == pytest.approx(0.5)
        assert j3 == pytest.approx(2.0 * phi0)
        assert j4 == pytest.approx(1.5)

    def test_array_matches_scalar(self):
        points = np.array([-3.0, -0.5, 0.0, 1.5, 6.0])
        moments = upper_partial_moments(points)
        for position, u in enumerate(points):
            expected = upper_partial_moments(float(u))
            np.testing.assert_allclose([row[position] for row in moments], expected, rtol=1e-14)

    @pytest.mark.parametrize('u', [10.0, 14.0, 20.0, 30.0])
    def test_far_tail_moments_keep_relative_accuracy(self, u):
        # J_k / phi(u) = int_0^inf w**k exp(-u w - w**2 / 2) dw
        density = math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
        moments = upper_partial_moments(u)
        for k in range(5):
            reference, _ = integrate.quad(
                lambda w: w ** k * math.exp(-u * w - 0.5 * w * w), 0.0, 60.0 / u, epsabs=0.0, epsrel=1e-13,
            )
            assert moments[k] == pytest.approx(density * reference, rel=1e-11)

    def test_both_recursions_agree_at_the_switch(self):
        below = upper_partial_moments(np.nextafter(BACKWARD_FROM, 0.0))
        above = upper_partial_moments(np.nextafter(BACKWARD_FROM, np.inf))
        np.testing.assert_allclose(below, above, rtol=1e-9)

    def test_truncated_chi2_exceeds_threshold(self):
        rng = RandomStream(3).generator()
        draws = truncated_chi2_upper(10_000, 4.0, rng)
        assert np.all(draws > 4.0)
        # E[Z**2 | Z**2 > 4] = 1 + 2 phi(2) / P(Z > 2)
        expected = 1.0 + 2.0 * math.exp(-2.0) / math.sqrt(2.0 * math.pi) / gauss_upper_tail(2.0)
        assert draws.mean() == pytest.approx(expected, rel=0.02)


class TestThresholdMoments:
    def test_soft_first_moment(self):
        assert soft_moments(0.0, 1.0, 1.0).m1 == pytest.approx(0.4839414, abs=1e-7)

    def test_hard_first_moment(self):
        assert hard_moments(0.0, 1.0, 1.0).m1 == pytest.approx(0.8012520, abs=1e-7)

    def test_zero_threshold_gives_plain_moments(self):
        for kind in (ThresholdKind.SOFT, ThresholdKind.HARD):
            moments = threshold_moments(0.7, 4.0, 0.0, kind)
            assert moments.m1 == pytest.approx(0.49 + 0.25)
            assert moments.variance == pytest.approx(4 * 0.49 / 4.0 + 2.0 / 16.0)

    @pytest.mark.parametrize('theta', [0.0, 0.3, -1.2, 5.0])
    def test_hard_dominates_soft(self, theta):
        soft = soft_moments(theta, 10.0, 0.4)
        hard = hard_moments(theta, 10.0, 0.4)
        assert soft.m1 <= hard.m1
        assert hard.m1 - soft.m1 <= 0.4

    def test_even_in_theta(self):
        assert soft_moments(0.8, 3.0, 1.0) == soft_moments(-0.8, 3.0, 1.0)

    @pytest.mark.parametrize('kind', [ThresholdKind.SOFT, ThresholdKind.HARD])
    @pytest.mark.parametrize('theta', [0.0, 0.05, 0.3, 1.0])
    def test_first_moment_is_nonincreasing_in_t(self, kind, theta):
        first = [threshold_moments(theta, 16.0, t, kind).m1 for t in np.linspace(0.0, 4.0, 400)]
        assert all(later <= earlier for earlier, later in zip(first, first[1:]))

    @pytest.mark.parametrize('kind', [ThresholdKind.SOFT, ThresholdKind.HARD])
    def test_first_moment_dies_out(self, kind):
        first = [threshold_moments(0.3, 10.0, t, kind).m1 for t in np.geomspace(1e-3, 1e3, 200)]
        assert all(later <= earlier for earlier, later in zip(first, first[1:]))
        assert first[0] > 0.1
        assert first[-1] < 1e-300

    def test_large_thresholds_stay_finite(self):
        moments = soft_moments(0.0, 1.0, 400.0)
        assert 0.0 <= moments.m1 < 1e-80
        assert math.isfinite(moments.m2)

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValueError):
            soft_moments(0.0, 1.0, -1.0)
        with pytest.raises(ValueError):
            threshold_moments(0.0, 1.0, 1.0, 'median')

    def test_arrays_match_scalars(self):
        thetas = np.array([0.0, 0.1, -0.5, 2.0])
        thresholds = np.array([0.2, 0.2, 0.8, 0.0])
        for kind in (ThresholdKind.SOFT, ThresholdKind.HARD):
            m1, m2 = threshold_moment_arrays(thetas, 5.0, thresholds, kind)
            for position in range(thetas.size):
                expected = threshold_moments(float(thetas[position]), 5.0, float(thresholds[position]), kind)
                assert m1[position] == pytest.approx(expected.m1, rel=1e-13)
                assert m2[position] == pytest.approx(expected.m2, rel=1e-13)


class TestCenteringConstant:
    def test_soft_value(self):
        assert centering_constant(4.0, 2.0, ThresholdKind.SOFT) == pytest.approx(0.0644520, abs=1e-7)

    @pytest.mark.parametrize('tau', [1.0, 2.0, 8.0, 30.0])
    def test_soft_closed_form_is_the_null_mean(self, tau):
        expected = soft_moments(0.0, 7.0, tau / 7.0).m1
        assert centering_constant(7.0, tau, ThresholdKind.SOFT) == pytest.approx(expected, rel=1e-10)

    def test_hard_exceeds_soft(self):
        assert centering_constant(4.0, 2.0, ThresholdKind.HARD) > centering_constant(4.0, 2.0, ThresholdKind.SOFT)

    def test_soft_needs_tau_at_least_one(self):
        with pytest.raises(ValueError):
            centering_constant(4.0, 0.5, ThresholdKind.SOFT)

    def test_exceedance_probability(self):
        assert null_exceedance_probability(0.0) == 1.0
        assert null_exceedance_probability(4.0) == pytest.approx(2 * 0.0227501319, rel=1e-9)


class TestOracle:
    @pytest.mark.parametrize('theta, n, t, kind, power', [
        (0.0, 1.0, 1.0, ThresholdKind.SOFT, 1),
        (0.3, 100.0, 0.05, ThresholdKind.HARD, 2),
        (-0.04, 1e4, 1e-3, ThresholdKind.SOFT, 2),
        (2.0, 1.0, 9.0, ThresholdKind.HARD, 1),
    ])
    def test_matches_closed_form(self, theta, n, t, kind, power):
        assert closed_form(theta, n, t, kind, power) == pytest.approx(
            quad_oracle(theta, n, t, kind, power), rel=ORACLE_RTOL,
        )

    def test_rejects_third_power(self):
        with pytest.raises(ValueError):
            quad_oracle(0.0, 1.0, 1.0, ThresholdKind.SOFT, 3)

    def test_short_sweep(self):
        for args, closed, oracle in oracle_sweep(count=50, seed=11):
            assert closed == pytest.approx(oracle, rel=ORACLE_RTOL), args

    @pytest.mark.slow
    def test_full_sweep(self):
        results = oracle_sweep(count=1000, seed=0)
        assert len(results) == 1000
        for args, closed, oracle in results:
            assert closed == pytest.approx(oracle, rel=ORACLE_RTOL), args


class TestThresholdBounds:
    def test_audit_grid_holds_everywhere(self):
        points = lemma1_audit()
        assert len(points) == 765
        failing = [point for point in points if not point.report.all_bounds_hold]
        assert failing == []

    def test_variance_bound_value(self):
        report = lemma1_check(1.0, 1.0, 9.0)
        assert report.bound_var == pytest.approx(6.0 + 30.0 * math.exp(-4.5))
        assert report.bound_bias == pytest.approx(1.0)
        assert report.variance_holds

    def test_bias_vanishes_at_zero(self):
        report = lemma1_check(0.0, 100.0, 4.0)
        assert report.bias == pytest.approx(0.0, abs=1e-13)

    def test_needs_tau_at_least_one(self):
        with pytest.raises(ValueError):
            lemma1_check(0.0, 1.0, 0.5)
