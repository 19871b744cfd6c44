import numpy as np
import pytest

from gsm.analytics.moments import ThresholdKind, centering_constant
from gsm.estimators import (
    EstimatorName,
    EstimatorSpec,
    EstimatorVariant,
    ThresholdSchedule,
    estimate,
    make_estimator,
    omega_r_alpha,
    q4_efficiency_region,
    soft_hard_gap,
)
from gsm.estimators.builders import nonparametric_m, parametric_m, truncation_length
from gsm.model.ball import BallSpec
from gsm.model.coefficients import CoefficientVector, NoiseLevel, sample_observation
from gsm.utils.random import RandomStream


class TestThresholdSchedule:
    @pytest.mark.parametrize('i, expected', [(1, 0), (4, 0), (5, 1), (8, 1), (9, 2), (16, 2), (17, 3)])
    def test_block_of(self, i, expected):
        schedule = ThresholdSchedule(4, 3, ThresholdKind.SOFT, NoiseLevel(10.0))
        assert schedule.block_of(i) == expected

    def test_vectorized_blocks_match(self):
        schedule = ThresholdSchedule(3, 6, ThresholdKind.HARD, NoiseLevel(10.0))
        indices = np.arange(1, schedule.end + 1)
        expected = [schedule.block_of(int(i)) for i in indices]
        np.testing.assert_array_equal(schedule.blocks_of(indices), expected)

    def test_tau_and_centering(self):
        schedule = ThresholdSchedule(4, 3, ThresholdKind.SOFT, NoiseLevel(10.0))
        assert schedule.tau(5) == 2.0
        assert schedule.tau(32) == 6.0
        assert schedule.centering(9) == centering_constant(10.0, 4.0, ThresholdKind.SOFT)
        with pytest.raises(ValueError):
            schedule.tau(3)
        with pytest.raises(ValueError):
            schedule.centering(33)

    def test_blocks_tile_the_tail(self):
        schedule = ThresholdSchedule(5, 4, ThresholdKind.SOFT, NoiseLevel(10.0))
        blocks = schedule.blocks()
        assert blocks[0].lower == schedule.m
        assert blocks[-1].upper == schedule.end == 80
        assert all(a.upper == b.lower for a, b in zip(blocks, blocks[1:]))
        assert sum(block.size for block in blocks) == schedule.end - schedule.m

    def test_indices_beyond_int64(self):
        schedule = ThresholdSchedule(3, 70, ThresholdKind.SOFT, NoiseLevel(10.0))
        assert schedule.end == 3 * 2 ** 70
        assert schedule.block_of(3 * 2 ** 69 + 1) == 70

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            ThresholdSchedule(0, 1, ThresholdKind.SOFT, NoiseLevel(1.0))
        with pytest.raises(ValueError):
            ThresholdSchedule(2, 1, 'median', NoiseLevel(1.0))
        with pytest.raises(ValueError):
            ThresholdSchedule(2, 1, ThresholdKind.NONE, NoiseLevel(1.0))


class TestEstimate:
    def test_q1_on_a_short_vector(self):
        assert estimate(EstimatorSpec.q1(2), [1.0, 2.0, 3.0], 1.0) == pytest.approx(3.0)

    def test_thresh_at_zero_observation(self):
        schedule = ThresholdSchedule(2, 1, ThresholdKind.SOFT, NoiseLevel(4.0))
        value = estimate(EstimatorSpec.thresh(schedule), np.zeros(4), 4.0)
        assert value == pytest.approx(-0.6289040, abs=1e-7)

    def test_sparse_and_dense_inputs_agree(self):
        schedule = ThresholdSchedule(3, 3, ThresholdKind.HARD, NoiseLevel(50.0))
        spec = EstimatorSpec.thresh(schedule)
        theta = CoefficientVector.from_dense([0.4, 0.0, 0.2, 0.0, 0.5], length=schedule.end)
        observation = sample_observation(theta, NoiseLevel(50.0), schedule.end, RandomStream(5))
        assert estimate(spec, observation, 50.0) == pytest.approx(estimate(spec, observation.to_dense(), 50.0))

    def test_q1_matches_its_diagonal_form(self):
        spec = EstimatorSpec.q1(3)
        Y = [0.5, -1.0, 2.0, 7.0]
        assert estimate(spec, Y, 4.0) == pytest.approx(estimate(spec.as_diag_quad(NoiseLevel(4.0)), Y, 4.0))

    def test_diag_quad(self):
        spec = EstimatorSpec.diag_quad([1.0, 0.5], -0.25)
        assert estimate(spec, [2.0, 2.0], 1.0) == pytest.approx(4.0 + 2.0 - 0.25)

    def test_short_observation_is_rejected(self):
        with pytest.raises(ValueError):
            estimate(EstimatorSpec.q1(5), [1.0, 2.0], 1.0)

    def test_schedule_noise_must_match(self):
        spec = EstimatorSpec.thresh(ThresholdSchedule(2, 1, ThresholdKind.SOFT, NoiseLevel(4.0)))
        with pytest.raises(ValueError):
            estimate(spec, np.zeros(4), 8.0)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            EstimatorSpec('median')


class TestSoftHardGap:
    def test_gap_terms_lie_between_zero_and_threshold(self):
        noise = NoiseLevel(20.0)
        hard = EstimatorSpec.thresh(ThresholdSchedule(4, 4, ThresholdKind.HARD, noise))
        soft = EstimatorSpec.thresh(ThresholdSchedule(4, 4, ThresholdKind.SOFT, noise))
        theta = CoefficientVector.from_dense(np.linspace(0.6, 0.0, 64))
        observation = sample_observation(theta, noise, 64, RandomStream(9))
        gap = soft_hard_gap(hard, observation, noise)
        assert np.all(gap.data_terms >= 0.0)
        assert np.all(gap.data_terms <= gap.thresholds)
        assert gap.centering_gap > 0.0
        difference = estimate(hard, observation, noise) - estimate(soft, observation, noise)
        assert gap.total == pytest.approx(difference, abs=1e-12)

    def test_needs_thresholding(self):
        with pytest.raises(ValueError):
            soft_hard_gap(EstimatorSpec.q1(2), [1.0, 2.0], 1.0)


class TestBuilders:
    def test_q2_tuning(self, hilbert_ball, noise_1024):
        est = make_estimator('q2', hilbert_ball, noise_1024)
        assert est.variant == EstimatorVariant.THRESH
        assert est.schedule.m == parametric_m(noise_1024) == 147
        assert est.schedule.j_star == 5
        assert est.name == EstimatorName.Q2

    def test_q3_tuning(self, sparse_ball, noise_1024):
        est = make_estimator('q3', sparse_ball, noise_1024)
        assert est.schedule.m == nonparametric_m(sparse_ball, noise_1024) == 4096
        assert est.schedule.j_star == 20

    def test_q1_and_truncated(self, hilbert_ball, noise_1024):
        assert make_estimator('q1', None, noise_1024).m == 147
        truncated = make_estimator('truncated', hilbert_ball, noise_1024)
        assert truncated.variant == EstimatorVariant.Q1
        assert truncated.m == 1024

    def test_q1_unrolls_to_its_diagonal_rule(self, noise_1024):
        rule = make_estimator('q1', None, noise_1024).as_diag_quad(noise_1024)
        assert rule.variant == EstimatorVariant.DIAG_QUAD
        np.testing.assert_array_equal(rule.coefficients, np.ones(147))
        assert rule.constant == -147 / 1024
        assert rule.provenance.name == EstimatorName.Q1

    def test_q5_default_length(self, noise_1024):
        est = make_estimator('q5', None, noise_1024)
        assert truncation_length(147, noise_1024) == 147 * 2 ** 15
        assert est.schedule.end == est.provenance.length == 147 * 2 ** 15

    def test_q6_quadratic_part(self, noise_1024):
        est = make_estimator('q6', None, noise_1024, r=0.5, length=2 ** 20)
        assert est.schedule.m == 32768
        assert est.schedule.j_star == 5

    def test_q4_range_grows_with_gamma(self, noise_1024):
        narrow = make_estimator('q4', None, noise_1024, gamma=1.5)
        wide = make_estimator('q4', None, noise_1024, gamma=3.0)
        assert narrow.schedule.j_star < wide.schedule.j_star

    def test_qtilde_copies_its_base(self, sparse_ball, hilbert_ball, noise_1024):
        tilde = make_estimator('qtilde', sparse_ball, noise_1024)
        base = make_estimator('q3', sparse_ball, noise_1024)
        assert tilde.schedule.tail_kind == ThresholdKind.HARD
        assert (tilde.schedule.m, tilde.schedule.j_star) == (base.schedule.m, base.schedule.j_star)
        assert make_estimator('qtilde', hilbert_ball, noise_1024).schedule.m == 147
        forced = make_estimator('qtilde', hilbert_ball, noise_1024, base='q5')
        assert forced.schedule.j_star == 15

    def test_m_override(self, hilbert_ball, noise_1024):
        assert make_estimator('q2', hilbert_ball, noise_1024, m_override=10).schedule.m == 10

    @pytest.mark.parametrize('kwargs', [
        dict(name='q4'),
        dict(name='q4', gamma=1.0),
        dict(name='q6', r=1.5),
        dict(name='q2'),
        dict(name='qtilde', base='q4'),
        dict(name='median'),
    ])
    def test_invalid_requests(self, kwargs, noise_1024):
        name = kwargs.pop('name')
        ball = BallSpec.lp(2.0, 0.25) if name == 'qtilde' else None
        with pytest.raises(ValueError):
            make_estimator(name, ball, noise_1024, **kwargs)

    def test_needs_n_above_one(self):
        with pytest.raises(ValueError):
            make_estimator('q1', None, 1.0)


class TestRegions:
    def test_omega(self):
        assert omega_r_alpha(1.5, 0.8) == pytest.approx(0.25)

    def test_omega_outside_region(self):
        with pytest.raises(ValueError):
            omega_r_alpha(1.5, 0.2)
        with pytest.raises(ValueError):
            omega_r_alpha(2.5, 0.8)

    @pytest.mark.parametrize('p, gamma, expected', [(1.0, 2.0, 0.625), (1.8, 1.5, 0.2777778)])
    def test_q4_efficiency_region(self, p, gamma, expected):
        assert q4_efficiency_region(p, gamma) == pytest.approx(expected, abs=1e-6)
