from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from gsm.analytics.gaussian import gauss_density, gauss_upper_tail, mills_ratio, upper_partial_moments
from gsm.model.coefficients import NoiseLevel


class ThresholdKind:
    SOFT = 'soft'
    HARD = 'hard'
    NONE = 'none'


@dataclass(frozen=True)
class ThresholdMoments:
    """First and second moments of a thresholded squared Gaussian observation"""
    m1: float
    m2: float

    @property
    def variance(self) -> float:
        return max(self.m2 - self.m1 * self.m1, 0.0)


def _as_noise(n: NoiseLevel | float) -> NoiseLevel:
    return n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))

def _check_threshold(t: float) -> None:
    if not t >= 0 or math.isinf(t):
        raise ValueError(f'Threshold t must be a finite nonnegative real, got {t}')

def _one_sided(theta: float, sigma: float, a: float, kind: str) -> tuple[float, float]:
    """Contribution of the event ``X > a`` for ``X ~ N(theta, sigma**2)``, ``a >= 0``.

    On that event write ``X = a + W`` with ``W = sigma (Z - u) >= 0``; then
    ``X**2 - a**2 = W (W + 2a)`` for the soft form and ``X**2 = (W + a)**2`` for the hard one.
    """
    u = (a - theta) / sigma
    j0, j1, j2, j3, j4 = upper_partial_moments(u, order=4)
    s1, s2, s3, s4 = sigma, sigma ** 2, sigma ** 3, sigma ** 4
    if kind == ThresholdKind.SOFT:
        first = s2 * j2 + 2.0 * a * s1 * j1
        second = s4 * j4 + 4.0 * a * s3 * j3 + 4.0 * a * a * s2 * j2
    else:
        first = s2 * j2 + 2.0 * a * s1 * j1 + a * a * j0
        second = (
            s4 * j4 + 4.0 * a * s3 * j3 + 6.0 * a * a * s2 * j2
            + 4.0 * a ** 3 * s1 * j1 + a ** 4 * j0
        )
    return first, second

def _threshold_moments(theta: float, n: NoiseLevel | float, t: float, kind: str) -> ThresholdMoments:
    _check_threshold(t)
    noise = _as_noise(n)
    a = math.sqrt(t)
    upper = _one_sided(theta, noise.sigma, a, kind)
    lower = _one_sided(-theta, noise.sigma, a, kind)
    return ThresholdMoments(m1=upper[0] + lower[0], m2=upper[1] + lower[1])

def soft_moments(theta: float, n: NoiseLevel | float, t: float) -> ThresholdMoments:
    """Moments of ``(X**2 - t)_+`` for ``X ~ N(theta, 1/n)``"""
    return _threshold_moments(theta, n, t, ThresholdKind.SOFT)

def hard_moments(theta: float, n: NoiseLevel | float, t: float) -> ThresholdMoments:
    """Moments of ``X**2 * 1{X**2 > t}`` for ``X ~ N(theta, 1/n)``"""
    return _threshold_moments(theta, n, t, ThresholdKind.HARD)

def threshold_moments(theta: float, n: NoiseLevel | float, t: float, kind: str) -> ThresholdMoments:
    if kind not in (ThresholdKind.SOFT, ThresholdKind.HARD):
        raise ValueError(f'Unsupported threshold kind "{kind}". Possible values are soft and hard')
    return _threshold_moments(theta, n, t, kind)

def centering_constant(n: NoiseLevel | float, tau: float, kind: str) -> float:
    """Null mean of one thresholded term: ``mu_{n,i}`` (soft) or ``rho_{n,i}`` (hard)"""
    noise = _as_noise(n)
    if kind == ThresholdKind.SOFT:
        if not tau >= 1:
            raise ValueError(f'The soft centering constant needs tau >= 1, got {tau}')
        root = math.sqrt(tau)
        # (2 sqrt(tau) phi(sqrt(tau)) - 2 (tau - 1) P(Z > sqrt(tau))) / n with phi factored out
        return gauss_density(root) * (2.0 * root - 2.0 * (tau - 1.0) * mills_ratio(root)) / noise.n
    if kind == ThresholdKind.HARD:
        if not tau >= 0:
            raise ValueError(f'The hard centering constant needs tau >= 0, got {tau}')
        return hard_moments(0.0, noise, tau / noise.n).m1
    raise ValueError(f'Unsupported threshold kind "{kind}". Possible values are soft and hard')

def null_exceedance_probability(tau: float) -> float:
    """``P(Z**2 > tau)`` for a standard normal Z"""
    return 2.0 * gauss_upper_tail(math.sqrt(tau))

def threshold_moment_arrays(thetas, n: NoiseLevel | float, thresholds, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized first and second moments for many coordinates at once.

    ``thetas`` and ``thresholds`` broadcast against each other; the result matches
    :func:`threshold_moments` coordinate by coordinate.
    """
    if kind not in (ThresholdKind.SOFT, ThresholdKind.HARD):
        raise ValueError(f'Unsupported threshold kind "{kind}". Possible values are soft and hard')
    noise = _as_noise(n)
    thetas, thresholds = np.broadcast_arrays(
        np.asarray(thetas, dtype=np.float64), np.asarray(thresholds, dtype=np.float64)
    )
    if np.any(~(thresholds >= 0)) or np.any(np.isinf(thresholds)):
        raise ValueError('Thresholds must be finite and nonnegative')
    if thetas.size == 0:
        return np.zeros(thetas.shape), np.zeros(thetas.shape)
    a = np.sqrt(thresholds)
    upper = _one_sided(thetas, noise.sigma, a, kind)
    lower = _one_sided(-thetas, noise.sigma, a, kind)
    return np.asarray(upper[0] + lower[0]), np.asarray(upper[1] + lower[1])
