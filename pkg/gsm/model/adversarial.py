from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from gsm.model.ball import BallKind, BallSpec, ball_norm, contains, spike_config
from gsm.model.coefficients import CoefficientVector, NoiseLevel

if TYPE_CHECKING:
    from gsm.estimators.estimator_spec import EstimatorSpec

# spikes are placed only where an int64 index (and its block) still fits
MAX_FAMILY_INDEX = 2 ** 62
MAX_SPIKES = 2 ** 20
MAX_DENSE_LENGTH = 2 ** 18
# n * h**2 for the multi-spike configurations, as multiples of the block threshold
SPIKE_LEVELS = (0.5, 1.0, 2.0)
DENSE_DECAY_MARGIN = 0.01


def _equal_spikes(start: int, count: int, height: float) -> CoefficientVector:
    indices = np.arange(start, start + count, dtype=np.int64)
    return CoefficientVector(indices, np.full(count, height), start + count - 1)

def _max_spike_count(spec: BallSpec, start: int, limit: int, height: float) -> int:
    """Largest ``k <= limit`` such that ``k`` spikes of ``height`` from ``start`` stay in the ball"""
    if spec.kind == BallKind.LP:
        # every weight i**(ps) is at least start**(ps)
        log_cap = spec.p * (math.log(spec.M) - math.log(height)) - spec.p * spec.s * math.log(start)
        if log_cap < math.log(limit):
            limit = max(int(math.floor(math.exp(log_cap))) + 1, 0)
    else:
        # the fullest of the L levels spanned holds k/L spikes and its weight is at least 2**(j0 s)
        first_level = start.bit_length() - 1
        spanned = (start + limit - 1).bit_length() - first_level
        log_cap = math.log(spanned) + spec.p * (
            math.log(spec.M) - math.log(height) - first_level * spec.s * math.log(2.0)
        )
        if log_cap < math.log(limit):
            limit = max(int(math.floor(math.exp(log_cap))) + 1, 0)
    limit = min(limit, MAX_SPIKES)
    if limit < 1 or not contains(spec, _equal_spikes(start, 1, height)):
        return 0
    low, high = 1, limit
    while low < high:
        middle = (low + high + 1) // 2
        if contains(spec, _equal_spikes(start, middle, height)):
            low = middle
        else:
            high = middle - 1
    return low

def _dense_config(spec: BallSpec, length: int) -> CoefficientVector:
    decay = spec.s + 1.0 / spec.p + DENSE_DECAY_MARGIN
    indices = np.arange(1, length + 1, dtype=np.int64)
    profile = np.exp(-decay * np.log(indices.astype(np.float64)))
    base = CoefficientVector(indices, profile, length)
    scale = spec.M / ball_norm(spec, base)
    config = base.scale(scale)
    while not contains(spec, config):
        scale = math.nextafter(scale, 0.0)
        config = base.scale(scale)
    return config

def adversarial_family(spec: BallSpec, est: EstimatorSpec, n: NoiseLevel) -> list[CoefficientVector]:
    """Deterministic list of ball members that stress the estimator's schedule.

    In order: the zero vector, the spike at index 1, one maximal spike at the first index
    of each block ``j = 1..J+2``, for each block the configurations of ``k`` equal spikes
    with ``n h**2`` in ``{tau/2, tau, 2 tau}`` and ``k`` maximal, and one dense
    configuration with polynomially decaying coefficients.
    """
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    m, j_star = est.family_schedule
    family = [CoefficientVector.zeros(), spike_config(spec, 1)]

    blocks = []
    for j in range(1, j_star + 3):
        lower = m * 2 ** (j - 1)
        if lower + 1 > MAX_FAMILY_INDEX:
            break
        blocks.append((j, lower, min(lower, MAX_FAMILY_INDEX - lower)))
    for _, lower, _ in blocks:
        family.append(spike_config(spec, lower + 1))

    for j, lower, size in blocks:
        tau = 2.0 * j
        for level in SPIKE_LEVELS:
            height = math.sqrt(level * tau / noise.n)
            count = _max_spike_count(spec, lower + 1, size, height)
            if count > 0:
                family.append(_equal_spikes(lower + 1, count, height))

    family.append(_dense_config(spec, min(m * 2 ** (j_star + 2), MAX_DENSE_LENGTH)))
    return family
