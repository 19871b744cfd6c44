from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from gsm.analytics.moments import threshold_moment_arrays, threshold_moments
from gsm.estimators.estimator_spec import EstimatorSpec, EstimatorVariant
from gsm.model.ball import BallSpec, tail_energy_bound
from gsm.model.coefficients import CoefficientVector, NoiseLevel
from gsm.utils.functional import stable_sum


@dataclass(frozen=True)
class BlockContribution:
    block: str
    bias: float
    variance: float


@dataclass(frozen=True)
class RiskReport:
    """Bias, variance and mean squared error of an estimator at one ``theta``"""
    bias: float
    variance: float
    risk: float
    std_error: float = 0.0
    replicates: int = 0
    per_block: tuple[BlockContribution, ...] = field(default_factory=tuple)
    truncation_bias_bound: float = 0.0

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload['per_block'] = [asdict(block) for block in self.per_block]
        return payload


def _as_noise(n: NoiseLevel | float) -> NoiseLevel:
    return n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))

def _quadratic_part(values: np.ndarray, count: int, noise: NoiseLevel) -> BlockContribution:
    # Y_i**2 - 1/n is unbiased for theta_i**2; Var = 4 theta_i**2 / n + 2 / n**2
    variance = 4.0 * stable_sum(values ** 2) / noise.n + 2.0 * count / noise.n ** 2
    return BlockContribution('quadratic', 0.0, variance)

def _remainder(theta: CoefficientVector, after: int) -> BlockContribution:
    _, values = theta.restrict(after, max(theta.max_index, after))
    return BlockContribution('remainder', -stable_sum(values ** 2), 0.0)

def _diag_quad_blocks(spec: EstimatorSpec, theta: CoefficientVector, noise: NoiseLevel) -> list[BlockContribution]:
    coefficients = spec.coefficients
    size = coefficients.size
    indices, values = theta.restrict(0, size)
    weights = coefficients[indices - 1]
    squares = values ** 2
    # B = sum a_i theta_i**2 + sum a_i / n + c - sum theta_i**2 over the coefficient range
    bias = stable_sum(np.concatenate([
        weights * squares,
        coefficients / noise.n,
        [spec.constant],
        -squares,
    ]))
    variance = (
        4.0 * stable_sum(weights ** 2 * squares) / noise.n
        + 2.0 * stable_sum(coefficients ** 2) / noise.n ** 2
    )
    return [BlockContribution('quadratic', bias, variance), _remainder(theta, size)]

def _tail_blocks(spec: EstimatorSpec, theta: CoefficientVector, noise: NoiseLevel) -> list[BlockContribution]:
    schedule = spec.schedule
    contributions = []
    for block in schedule.blocks():
        indices, values = theta.restrict(block.lower, block.upper)
        threshold = block.tau / noise.n
        m1, m2 = threshold_moment_arrays(values, noise, threshold, schedule.tail_kind)
        bias = stable_sum(m1 - block.centering - values ** 2)
        variance = stable_sum(np.maximum(m2 - m1 * m1, 0.0))
        zeros = block.size - indices.size
        if zeros > 0:
            # zero coordinates share the null moments; their mean is the centering constant
            null = threshold_moments(0.0, noise, threshold, schedule.tail_kind)
            variance += zeros * null.variance
        contributions.append(BlockContribution(f'tail-{block.j}', bias, variance))
    return contributions

def truncation_bias_bound(spec: EstimatorSpec, ball: BallSpec | None = None) -> float:
    """Bound on the bias from cutting an infinite tail at the schedule end (0 for finite estimators)"""
    provenance = spec.provenance
    if provenance is None or provenance.length is None or spec.variant != EstimatorVariant.THRESH:
        return 0.0
    ball = ball or provenance.ball
    if ball is None:
        return 0.0
    return tail_energy_bound(ball, spec.schedule.end)

def exact_risk(
    spec: EstimatorSpec,
    theta: CoefficientVector,
    n: NoiseLevel | float,
    ball: BallSpec | None = None,
) -> RiskReport:
    """Exact bias and variance from per-coordinate moments.

    Coordinates are independent, so both add up coordinate by coordinate; the zero
    coordinates of a threshold block all share the null moments and are counted, not
    enumerated, which keeps schedules of astronomically many indices cheap.
    """
    noise = _as_noise(n)
    spec.check_noise(noise)

    if spec.variant == EstimatorVariant.DIAG_QUAD:
        blocks = _diag_quad_blocks(spec, theta, noise)
    else:
        _, head = theta.restrict(0, spec.m)
        blocks = [_quadratic_part(head, spec.m, noise)]
        if spec.variant == EstimatorVariant.THRESH:
            blocks.extend(_tail_blocks(spec, theta, noise))
        blocks.append(_remainder(theta, spec.required_length))

    bias = stable_sum([block.bias for block in blocks])
    variance = stable_sum([block.variance for block in blocks])
    return RiskReport(
        bias=bias,
        variance=variance,
        risk=bias * bias + variance,
        per_block=tuple(blocks),
        truncation_bias_bound=truncation_bias_bound(spec, ball),
    )
