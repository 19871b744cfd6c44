from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from gsm.bounds.exponents import smoothness
from gsm.estimators.estimator_spec import EstimatorSpec
from gsm.model.adversarial import adversarial_family
from gsm.model.ball import BallSpec
from gsm.model.coefficients import CoefficientVector, NoiseLevel, quadratic_functional
from gsm.utils.random import RandomStream
from qfe.detect.sampler import EXACT_BLOCK_LIMIT, AggregatedSampler
from qfe.utils.logging import logger

MIN_REPLICATES = 100
CALIBRATION_ITERATIONS = 20
# relative slack on Q(theta) >= a for alternatives rescaled onto the level a
SIGNAL_RTOL = 1e-12
NULL_STREAM = 0


class Decision:
    ACCEPT = 'accept'
    REJECT = 'reject'


@dataclass(frozen=True)
class DetectionOutcome:
    type1: float
    max_type2: float
    replicates: int
    a: float

    @property
    def sum(self) -> float:
        return self.type1 + self.max_type2

    def to_dict(self) -> dict:
        return {
            'type1': self.type1,
            'max_type2': self.max_type2,
            'sum': self.sum,
            'replicates': self.replicates,
            'a': self.a,
        }


@dataclass(frozen=True)
class Calibration:
    """Result of the bisection for the smallest detectable signal size"""
    a: float
    lower: float
    bracket: tuple[float, float]
    iterations: int
    outcome: DetectionOutcome


def decide(q_hat: float, a: float) -> str:
    """Reject ``theta = 0`` iff the estimate exceeds half the signal size"""
    if not a > 0:
        raise ValueError(f'a must be positive, got {a}')
    return Decision.REJECT if q_hat > a / 2.0 else Decision.ACCEPT

def _check_alternatives(alternatives, a: float) -> None:
    for position, theta in enumerate(alternatives):
        signal = quadratic_functional(theta)
        if signal < a * (1.0 - SIGNAL_RTOL):
            raise ValueError(f'Alternative {position} has Q(theta) = {signal} below the level a = {a}')

def _rates(null_estimates: np.ndarray, alternative_estimates: list[np.ndarray], a: float) -> DetectionOutcome:
    cutoff = a / 2.0
    type1 = float(np.mean(null_estimates > cutoff))
    type2 = [float(np.mean(estimates <= cutoff)) for estimates in alternative_estimates]
    return DetectionOutcome(type1=type1, max_type2=max(type2, default=0.0), replicates=null_estimates.size, a=a)

def error_rates(
    spec: EstimatorSpec,
    n: NoiseLevel | float,
    a: float,
    alternatives: list[CoefficientVector],
    replicates: int,
    master_seed: int,
    exact_block_limit: int = EXACT_BLOCK_LIMIT,
) -> DetectionOutcome:
    """Empirical type I error at ``theta = 0`` and the largest type II error over ``alternatives``.

    The null uses stream ``(master_seed, 0)`` and alternative ``k`` stream ``(master_seed, k + 1)``,
    so with a fixed seed the rates are pathwise monotone in ``a``.
    """
    if not a > 0:
        raise ValueError(f'a must be positive, got {a}')
    if replicates < MIN_REPLICATES:
        raise ValueError(f'Error rates need at least {MIN_REPLICATES} replicates, got {replicates}')
    _check_alternatives(alternatives, a)
    sampler = AggregatedSampler(spec, n, exact_block_limit)
    null_estimates = sampler.draw(CoefficientVector.zeros(), replicates, RandomStream(master_seed, NULL_STREAM))
    alternative_estimates = [
        sampler.draw(theta, replicates, RandomStream(master_seed, position + 1))
        for position, theta in enumerate(alternatives)
    ]
    return _rates(null_estimates, alternative_estimates, a)

def rescaled_alternatives(family: list[CoefficientVector], a: float) -> list[tuple[int, CoefficientVector]]:
    """Members with ``Q >= a`` shrunk onto ``Q = a``; smaller members are dropped, never inflated"""
    alternatives = []
    for position, theta in enumerate(family):
        signal = quadratic_functional(theta)
        if signal > 0 and signal >= a:
            alternatives.append((position, theta.scale(math.sqrt(a / signal))))
    return alternatives

class _FamilyTester:
    """Error rates against the adversarial family rescaled onto a signal level.

    The null draws are shared by every level; family member ``k`` always uses stream
    ``(master_seed, k + 1)``, so the rates at two levels are coupled pathwise.
    """

    def __init__(
        self,
        spec: EstimatorSpec,
        noise: NoiseLevel,
        ball: BallSpec,
        replicates: int,
        master_seed: int,
        exact_block_limit: int,
    ) -> None:
        if replicates < MIN_REPLICATES:
            raise ValueError(f'Error rates need at least {MIN_REPLICATES} replicates, got {replicates}')
        self.family = adversarial_family(ball, spec, noise)
        self.sampler = AggregatedSampler(spec, noise, exact_block_limit)
        self.replicates = replicates
        self.master_seed = master_seed
        self.null_estimates = self.sampler.draw(
            CoefficientVector.zeros(), replicates, RandomStream(master_seed, NULL_STREAM),
        )
        self.largest_signal = max(quadratic_functional(theta) for theta in self.family)

    def __call__(self, a: float) -> DetectionOutcome:
        alternatives = rescaled_alternatives(self.family, a)
        if not alternatives:
            raise ValueError(f'No family member has Q(theta) >= {a}')
        estimates = [
            self.sampler.draw(theta, self.replicates, RandomStream(self.master_seed, position + 1))
            for position, theta in alternatives
        ]
        return _rates(self.null_estimates, estimates, a)


def family_error_rates(
    spec: EstimatorSpec,
    n: NoiseLevel | float,
    a: float,
    ball: BallSpec,
    replicates: int,
    master_seed: int,
    exact_block_limit: int = EXACT_BLOCK_LIMIT,
) -> DetectionOutcome:
    """Error rates at level ``a`` with the alternatives taken from the adversarial family"""
    if not a > 0:
        raise ValueError(f'a must be positive, got {a}')
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    tester = _FamilyTester(spec, noise, ball, replicates, master_seed, exact_block_limit)
    return tester(a)

def bisect_threshold(
    spec: EstimatorSpec,
    n: NoiseLevel | float,
    gamma: float,
    ball: BallSpec,
    replicates: int,
    master_seed: int,
    iterations: int = CALIBRATION_ITERATIONS,
    exact_block_limit: int = EXACT_BLOCK_LIMIT,
) -> Calibration:
    """Geometric bisection on ``[n**-2, max Q]`` for the smallest ``a`` with error sum ``<= gamma``.

    Alternatives at level ``a`` are the adversarial family members rescaled down to
    ``Q = a``; the upper end of the bracket is the largest ``Q`` in the family (``M**2``
    up to rounding).
    """
    if not 0 < gamma < 1:
        raise ValueError(f'gamma must lie in (0, 1), got {gamma}')
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    evaluate = _FamilyTester(spec, noise, ball, replicates, master_seed, exact_block_limit)

    lower = noise.n ** -2.0
    upper = min(ball.M ** 2, evaluate.largest_signal)
    bracket = (lower, upper)
    outcome = evaluate(upper)
    if outcome.sum > gamma:
        raise ValueError(
            f'No a in [{lower:g}, {upper:g}] reaches an error sum <= {gamma} '
            f'(sum at the upper end is {outcome.sum:g})'
        )
    lower_outcome = evaluate(lower)
    if lower_outcome.sum <= gamma:
        logger.info('Error sum %g already holds at the bottom of the bracket', lower_outcome.sum)
        return Calibration(a=lower, lower=lower, bracket=bracket, iterations=0, outcome=lower_outcome)

    for _ in range(iterations):
        middle = math.sqrt(lower * upper)
        middle_outcome = evaluate(middle)
        if middle_outcome.sum <= gamma:
            upper, outcome = middle, middle_outcome
        else:
            lower = middle
    logger.debug('Calibrated a=%g (last failing level %g) at n=%g', upper, lower, noise.n)
    return Calibration(a=upper, lower=lower, bracket=bracket, iterations=iterations, outcome=outcome)

def calibrate_a(
    spec: EstimatorSpec,
    n: NoiseLevel | float,
    gamma: float,
    ball: BallSpec,
    replicates: int,
    master_seed: int,
    iterations: int = CALIBRATION_ITERATIONS,
    exact_block_limit: int = EXACT_BLOCK_LIMIT,
) -> float:
    return bisect_threshold(
        spec, n, gamma, ball, replicates, master_seed,
        iterations=iterations, exact_block_limit=exact_block_limit,
    ).a

def testing_exponent(p: float, alpha: float) -> float:
    """Exponent ``1 - p / (2 (1 + 2ps))`` of the optimal detection boundary ``n ** -r``"""
    s = smoothness(p, alpha)
    if not 0 < p < 2:
        raise ValueError(f'The testing exponent is derived for 0 < p < 2, got p={p}')
    if alpha > 1.0 / (2.0 * p):
        raise ValueError(
            f'alpha={alpha} exceeds 1/(2p)={1.0 / (2.0 * p):g}; the detection rate is not sharp there'
        )
    return 1.0 - p / (2.0 * (1.0 + 2.0 * p * s))

def testing_lower_bound(gamma: float, a: float) -> float:
    """``gamma a**2 / 8``: a test built from an estimator with larger error sum forces this much risk"""
    if not 0 < gamma < 1:
        raise ValueError(f'gamma must lie in (0, 1), got {gamma}')
    if not a > 0:
        raise ValueError(f'a must be positive, got {a}')
    return gamma * a * a / 8.0
