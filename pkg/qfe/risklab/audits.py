from __future__ import annotations

import math

from gsm.analytics.moments import ThresholdKind
from gsm.bounds.mixture import MixtureSpec, sample_mixture
from gsm.estimators.estimator_spec import EstimatorSpec, EstimatorVariant
from gsm.model.adversarial import adversarial_family
from gsm.model.ball import BallSpec
from gsm.model.coefficients import CoefficientVector, NoiseLevel
from gsm.utils.functional import stable_sum
from gsm.utils.random import RandomStream
from qfe.risklab.exact import exact_risk

VARIANCE_SLACK = 1e-12


def variance_bound_53(spec: EstimatorSpec, theta: CoefficientVector, n: NoiseLevel | float) -> float:
    """Upper bound on the variance of a soft-thresholding estimator.

    ``2m/n**2 + 4 sum_{i<=m} theta_i**2 / n + 6 sum_{m<i<=end} theta_i**2 / n
    + sum_j 2**(j-1) m (4 sqrt(2j) + 18) / (n**2 e**j)``
    """
    if spec.variant != EstimatorVariant.THRESH or spec.schedule.tail_kind != ThresholdKind.SOFT:
        raise ValueError(f'The variance bound holds for soft thresholding estimators only, got {spec}')
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    spec.check_noise(noise)
    schedule = spec.schedule
    _, head = theta.restrict(0, schedule.m)
    _, tail = theta.restrict(schedule.m, schedule.end)
    block_terms = [
        block.size * (4.0 * math.sqrt(block.tau) + 18.0) / (noise.n ** 2 * math.exp(block.tau / 2.0))
        for block in schedule.blocks()
    ]
    return stable_sum([
        2.0 * schedule.m / noise.n ** 2,
        4.0 * stable_sum(head ** 2) / noise.n,
        6.0 * stable_sum(tail ** 2) / noise.n,
        *block_terms,
    ])

def mixture_average_risk(
    spec: EstimatorSpec,
    mixture: MixtureSpec,
    n: NoiseLevel | float,
    draws: int,
    master_seed: int,
) -> float:
    """Mean exact risk over ``draws`` random vertices of the spike mixture"""
    if draws < 1:
        raise ValueError(f'draws must be positive, got {draws}')
    risks = [
        exact_risk(spec, sample_mixture(mixture, RandomStream(master_seed, draw)), n).risk
        for draw in range(draws)
    ]
    return stable_sum(risks) / draws

def variance_audit(
    spec: EstimatorSpec,
    ball: BallSpec,
    n: NoiseLevel | float,
    slack: float = VARIANCE_SLACK,
) -> list[int]:
    """Adversarial family positions whose exact variance exceeds :func:`variance_bound_53`"""
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    failures = []
    for position, theta in enumerate(adversarial_family(ball, spec, noise)):
        variance = exact_risk(spec, theta, noise).variance
        bound = variance_bound_53(spec, theta, noise)
        if variance > bound * (1.0 + slack):
            failures.append(position)
    return failures
