from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from gsm.analytics.gaussian import SQRT_2PI
from gsm.analytics.moments import ThresholdKind, threshold_moments
from gsm.model.coefficients import NoiseLevel

# half-width of the integration window in noise standard deviations
WINDOW_SDS = 12.0
# tolerances in standardized units; the contract is 1e-12 * (1 + |result|)
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12
REPORTED_TOL = 1e-12
MAX_SUBDIVISIONS = 400


class QuadratureError(RuntimeError):
    """Raised when the brute-force integrator cannot reach its tolerance"""


def _statistic(kind: str, threshold: float, power: int):
    # works on w = sqrt(n) * x, i.e. on n * x**2 and n * t
    if kind == ThresholdKind.SOFT:
        return lambda w: max(w * w - threshold, 0.0) ** power
    if kind == ThresholdKind.HARD:
        return lambda w: (w * w) ** power if w * w > threshold else 0.0
    raise ValueError(f'Unsupported threshold kind "{kind}". Possible values are soft and hard')

def quad_oracle(theta: float, n: NoiseLevel | float, t: float, kind: str, power: int) -> float:
    """Adaptive quadrature of a thresholded statistic of ``X ~ N(theta, 1/n)``.

    Integrates over ``theta +- 12/sqrt(n)`` in the standardized variable
    ``z = sqrt(n) (x - theta)``, split at the kinks ``x = +-sqrt(t)``.
    """
    if power not in (1, 2):
        raise ValueError(f'power must be 1 or 2, got {power}')
    if not t >= 0 or math.isinf(t):
        raise ValueError(f'Threshold t must be a finite nonnegative real, got {t}')
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    shift = theta * math.sqrt(noise.n)
    threshold = t * noise.n
    statistic = _statistic(kind, threshold, power)

    def integrand(z: float) -> float:
        return statistic(shift + z) * math.exp(-0.5 * z * z) / SQRT_2PI

    root = math.sqrt(threshold)
    kinks = (-root - shift, root - shift)
    cuts = sorted({-WINDOW_SDS, WINDOW_SDS, *(k for k in kinks if -WINDOW_SDS < k < WINDOW_SDS)})

    total = 0.0
    total_error = 0.0
    for left, right in zip(cuts[:-1], cuts[1:]):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always', integrate.IntegrationWarning)
            value, error = integrate.quad(
                integrand, left, right,
                epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=MAX_SUBDIVISIONS,
            )
        # a warning only matters when the error estimate misses the tolerance
        if caught and error > REPORTED_TOL * (1.0 + abs(value)):
            raise QuadratureError(
                f'Quadrature did not converge on z in [{left}, {right}] '
                f'(theta={theta}, n={noise.n}, t={t}, kind={kind}, power={power}): {caught[0].message}'
            )
        total += value
        total_error += error
    if total_error > REPORTED_TOL * (1.0 + abs(total)):
        raise QuadratureError(f'Quadrature error estimate {total_error} exceeds the tolerance')
    return total / noise.n ** power

def closed_form(theta: float, n: NoiseLevel | float, t: float, kind: str, power: int) -> float:
    """Closed-form counterpart of :func:`quad_oracle`"""
    moments = threshold_moments(theta, n, t, kind)
    return moments.m1 if power == 1 else moments.m2

def oracle_sweep(count: int = 1000, seed: int = 0) -> list[tuple[tuple, float, float]]:
    """Random ``(theta, n, t, kind, power)`` tuples with their closed form and oracle values"""
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(count):
        n = float(10.0 ** rng.uniform(0.0, 4.0))
        theta = float(rng.uniform(-4.0, 4.0)) / math.sqrt(n)
        t = float(rng.uniform(0.0, 16.0)) / n
        kind = ThresholdKind.SOFT if rng.random() < 0.5 else ThresholdKind.HARD
        power = int(rng.integers(1, 3))
        args = (theta, n, t, kind, power)
        results.append((args, closed_form(*args), quad_oracle(*args)))
    return results
