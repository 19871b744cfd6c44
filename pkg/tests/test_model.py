import math

import numpy as np
import pytest

from gsm.estimators.builders import make_estimator
from gsm.estimators.estimator_spec import EstimatorSpec
from gsm.model.adversarial import MAX_FAMILY_INDEX, adversarial_family
from gsm.model.ball import (
    BallSpec,
    ball_norm,
    contains,
    quadratic_hull,
    spike_config,
    spike_height,
    tail_energy_bound,
)
from gsm.model.coefficients import (
    BesovIndex,
    CoefficientVector,
    NoiseLevel,
    quadratic_functional,
    sample_observation,
)
from gsm.utils.functional import largest_doubling, levels_of, parse_grid, safe_floor, stable_sum
from gsm.utils.random import RandomStream

BALLS = [
    BallSpec.lp(1.5, 0.25),
    BallSpec.lp(1.0, 1.2),
    BallSpec.besov(1.5, 2.0, 0.5),
    BallSpec.besov(1.2, math.inf, 0.6, 2.0),
]


def _random_vector(rng: np.random.Generator, max_index: int = 5000) -> CoefficientVector:
    size = int(rng.integers(1, 20))
    indices = rng.choice(max_index, size=size, replace=False) + 1
    return CoefficientVector(indices, rng.standard_normal(size), max_index)


class TestNoiseLevel:
    @pytest.mark.parametrize('n', [0.0, -1.0, math.inf, math.nan])
    def test_rejects_invalid(self, n):
        with pytest.raises(ValueError):
            NoiseLevel(n)

    def test_sigma(self):
        assert NoiseLevel(4.0).sigma == 0.5
        assert NoiseLevel(4.0).variance == 0.25


class TestBesovIndex:
    def test_flat_round_trip(self):
        assert BesovIndex(2, 1).flat == 5
        assert BesovIndex.from_flat(5) == BesovIndex(2, 1)
        assert BesovIndex.from_flat(1) == BesovIndex(0, 0)

    def test_flat_index_is_a_bijection(self):
        for i in range(1, 2 ** 20 + 1):
            position = BesovIndex.from_flat(i)
            assert position.flat == i

    def test_rejects_k_outside_level(self):
        with pytest.raises(ValueError):
            BesovIndex(2, 4)


class TestCoefficientVector:
    def test_from_dense_keeps_support_only(self):
        theta = CoefficientVector.from_dense([0.0, 2.0, 0.0, -1.0])
        assert theta.length == 4
        np.testing.assert_array_equal(theta.indices, [2, 4])
        np.testing.assert_array_equal(theta.values, [2.0, -1.0])
        assert theta[2] == 2.0
        assert theta[3] == 0.0
        assert theta.max_index == 4

    def test_unsorted_input_is_sorted(self):
        theta = CoefficientVector(np.array([5, 2]), np.array([1.0, 3.0]), 6)
        np.testing.assert_array_equal(theta.indices, [2, 5])
        np.testing.assert_array_equal(theta.values, [3.0, 1.0])

    def test_rejects_duplicates_and_overflow(self):
        with pytest.raises(ValueError):
            CoefficientVector(np.array([2, 2]), np.array([1.0, 1.0]), 3)
        with pytest.raises(ValueError):
            CoefficientVector(np.array([4]), np.array([1.0]), 3)
        with pytest.raises(ValueError):
            CoefficientVector(np.array([0]), np.array([1.0]), 3)

    def test_restrict_is_half_open(self):
        theta = CoefficientVector.from_dense([1.0, 2.0, 3.0, 4.0])
        indices, values = theta.restrict(1, 3)
        np.testing.assert_array_equal(indices, [2, 3])
        np.testing.assert_array_equal(values, [2.0, 3.0])

    def test_restrict_accepts_bounds_beyond_int64(self):
        theta = CoefficientVector.spike(10, 1.0)
        indices, _ = theta.restrict(5, 2 ** 80)
        np.testing.assert_array_equal(indices, [10])
        indices, _ = theta.restrict(2 ** 70, 2 ** 80)
        assert indices.size == 0

    def test_to_dense(self):
        theta = CoefficientVector.spike(3, 2.0, length=5)
        np.testing.assert_array_equal(theta.to_dense(), [0.0, 0.0, 2.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            theta.to_dense(2)

    def test_quadratic_functional(self):
        assert quadratic_functional(CoefficientVector.from_dense([3.0, 4.0])) == 25.0
        assert quadratic_functional(CoefficientVector.zeros()) == 0.0


class TestSampleObservation:
    def test_same_stream_reproduces_draws(self):
        theta = CoefficientVector.from_dense([1.0, -2.0, 0.5])
        first = sample_observation(theta, NoiseLevel(10.0), 8, RandomStream(7, 3))
        second = sample_observation(theta, NoiseLevel(10.0), 8, RandomStream(7, 3))
        other = sample_observation(theta, NoiseLevel(10.0), 8, RandomStream(7, 4))
        assert first == second
        assert first != other

    def test_mean_is_theta(self):
        theta = CoefficientVector.from_dense([1.0, -2.0])
        observation = sample_observation(theta, NoiseLevel(1e8), 2, RandomStream(0, 0))
        np.testing.assert_allclose(observation.to_dense(), [1.0, -2.0], atol=1e-3)

    def test_first_coordinate_is_standard_normal(self):
        zero, noise = CoefficientVector.zeros(), NoiseLevel(1.0)
        draws = np.array([
            sample_observation(zero, noise, 1, RandomStream(11, index))[1]
            for index in range(100_000)
        ])
        assert abs(draws.mean()) <= 0.013
        assert 0.98 <= draws.var(ddof=1) <= 1.02

    def test_length_must_cover_support(self):
        with pytest.raises(ValueError):
            sample_observation(CoefficientVector.spike(5, 1.0), NoiseLevel(1.0), 4, RandomStream(0))


class TestRandomStream:
    def test_children_do_not_collide(self):
        a = RandomStream(1, 2).child(3).generator().random(4)
        b = RandomStream(1, 3).child(2).generator().random(4)
        assert not np.array_equal(a, b)


class TestFunctional:
    def test_safe_floor_absorbs_pow_rounding(self):
        assert safe_floor(1024.0 ** 1.2) == 4096
        assert safe_floor(2.5) == 2

    @pytest.mark.parametrize('m, bound, expected', [(147, 7097.8, 5), (3, 5.9, 0), (3, 6.0, 1), (1, 2.0 ** 70, 70)])
    def test_largest_doubling(self, m, bound, expected):
        assert largest_doubling(m, bound) == expected

    def test_levels_of_is_exact_near_powers_of_two(self):
        indices = np.array([1, 2, 3, 4, 7, 8, 2 ** 52 - 1, 2 ** 52, 2 ** 62 - 1, 2 ** 62])
        np.testing.assert_array_equal(levels_of(indices), [0, 1, 1, 2, 2, 3, 51, 52, 61, 62])

    def test_stable_sum_ignores_order(self):
        values = [1e16, 1.0, -1e16, 3.0]
        assert stable_sum(values) == 4.0
        assert stable_sum(values[::-1]) == 4.0
        assert stable_sum(np.array([[0.1] * 10])) == 1.0
        assert stable_sum([]) == 0.0

    def test_parse_grid(self):
        assert parse_grid('0.05:0.08:0.01') == [0.05, 0.06, 0.07, 0.08]
        assert len(parse_grid('0.05:0.80:0.01')) == 76
        assert parse_grid('1, 2,4') == [1.0, 2.0, 4.0]
        with pytest.raises(ValueError):
            parse_grid('1:0:0.1')


class TestBall:
    def test_smoothness_must_be_positive(self):
        with pytest.raises(ValueError):
            BallSpec.lp(1.0, 0.4)
        with pytest.raises(ValueError):
            BallSpec.besov(1.5, 2.0, 0.1)

    def test_lp_norm_of_a_spike(self):
        ball = BallSpec.lp(2.0, 0.5, 2.0)
        theta = CoefficientVector.spike(4, 1.0)
        assert ball_norm(ball, theta) == pytest.approx(2.0)
        assert contains(ball, theta.scale(0.99))
        assert not contains(ball, theta.scale(1.01))

    def test_besov_norm_uses_levels(self, besov_ball):
        theta = CoefficientVector.spike(4, 1.0)
        assert ball_norm(besov_ball, theta) == pytest.approx(2.0 ** (2 * besov_ball.s))
        two_levels = CoefficientVector(np.array([2, 4]), np.array([1.0, 1.0]), 4)
        expected = math.hypot(2.0 ** besov_ball.s, 2.0 ** (2 * besov_ball.s))
        assert ball_norm(besov_ball, two_levels) == pytest.approx(expected)

    @pytest.mark.parametrize('position', [1, 2, 3, 17, 1000, 2 ** 40])
    def test_spikes_sit_on_the_boundary(self, sparse_ball, besov_ball, position):
        for ball in (sparse_ball, besov_ball):
            spike = spike_config(ball, position)
            assert contains(ball, spike)
            assert ball_norm(ball, spike) == pytest.approx(ball.M, rel=1e-14)

    def test_besov_position(self, besov_ball):
        assert spike_height(besov_ball, BesovIndex(3, 2)) == spike_height(besov_ball, 10)

    @pytest.mark.parametrize('ball', BALLS, ids=str)
    def test_norm_is_homogeneous(self, ball):
        rng = np.random.default_rng(0)
        for _ in range(200):
            theta = _random_vector(rng)
            norm = ball_norm(ball, theta)
            for c in (-3.0, -1.0, 0.5, 2.0):
                assert ball_norm(ball, theta.scale(c)) == pytest.approx(abs(c) * norm, rel=1e-12)
            assert ball_norm(ball, theta.scale(0.0)) == 0.0

    @pytest.mark.parametrize('ball', BALLS + [BallSpec.lp(2.0, 0.25), BallSpec.lp(3.0, 0.3)], ids=str)
    def test_hull_is_idempotent(self, ball):
        assert quadratic_hull(quadratic_hull(ball)) == quadratic_hull(ball)

    def test_quadratic_hull(self, sparse_ball, hilbert_ball):
        hull = quadratic_hull(sparse_ball)
        assert hull.p == 2.0
        assert hull.alpha == pytest.approx(sparse_ball.s)
        assert hull.s == pytest.approx(sparse_ball.s)
        assert quadratic_hull(hilbert_ball) == hilbert_ball

    @pytest.mark.parametrize('ball', BALLS, ids=str)
    def test_hull_contains_ball_members(self, ball):
        rng = np.random.default_rng(1)
        hull = quadratic_hull(ball)
        for _ in range(1000):
            theta = _random_vector(rng)
            member = theta.scale(rng.uniform(0.0, 0.999) * ball.M / ball_norm(ball, theta))
            assert contains(ball, member)
            assert contains(hull, member)

    @pytest.mark.parametrize('ball', [BallSpec.lp(1.5, 0.25), BallSpec.lp(3.0, 0.3), BallSpec.besov(1.5, 2.0, 0.5)])
    def test_tail_energy_bound_dominates_spikes(self, ball):
        length = 100
        for position in (101, 150, 1000):
            assert spike_height(ball, position) ** 2 <= tail_energy_bound(ball, length)


class TestAdversarialFamily:
    def test_members_lie_in_the_ball(self, sparse_ball, noise_1024):
        est = make_estimator('q3', sparse_ball, noise_1024)
        family = adversarial_family(sparse_ball, est, noise_1024)
        assert quadratic_functional(family[0]) == 0.0
        assert family[1] == spike_config(sparse_ball, 1)
        assert all(contains(sparse_ball, theta) for theta in family)
        assert all(theta.max_index <= MAX_FAMILY_INDEX for theta in family)

    @pytest.mark.parametrize('name, ball', [
        ('q3', BallSpec.lp(1.5, 0.25, 1.0)),
        ('q2', BallSpec.lp(1.25, 0.5, 1.0)),
        ('q2', BallSpec.lp(1.0, 1.2, 2.0)),
        ('truncated', BallSpec.lp(1.5, 0.25, 0.5)),
    ], ids=str)
    def test_signal_never_exceeds_the_index_one_spike(self, name, ball, noise_1024):
        family = adversarial_family(ball, make_estimator(name, ball, noise_1024), noise_1024)
        signals = [quadratic_functional(theta) for theta in family]
        assert max(signals) <= ball.M ** 2
        assert signals[1] == pytest.approx(ball.M ** 2)

    def test_is_deterministic(self, besov_ball, noise_1024):
        est = make_estimator('q2', besov_ball, noise_1024)
        first = adversarial_family(besov_ball, est, noise_1024)
        second = adversarial_family(besov_ball, est, noise_1024)
        assert len(first) == len(second)
        assert all(a == b for a, b in zip(first, second))

    def test_block_spikes_follow_the_schedule(self, hilbert_ball, noise_1024):
        est = make_estimator('q2', hilbert_ball, noise_1024)
        m, j_star = est.family_schedule
        family = adversarial_family(hilbert_ball, est, noise_1024)
        starts = [theta.indices[0] for theta in family[2:2 + j_star + 2]]
        assert starts == [m * 2 ** (j - 1) + 1 for j in range(1, j_star + 3)]

    def test_quadratic_rules_use_two_blocks(self, hilbert_ball, noise_1024):
        est = EstimatorSpec.q1(10)
        family = adversarial_family(hilbert_ball, est, noise_1024)
        assert family[2] == spike_config(hilbert_ball, 11)
        assert family[3] == spike_config(hilbert_ball, 21)
