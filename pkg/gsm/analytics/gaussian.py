import math

import numpy as np
from scipy import special

SQRT_2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
BACKWARD_FROM = 8.0
CONTINUED_FRACTION_DEPTH = 100


def gauss_density(z: float) -> float:
    """Standard normal density ``phi(z)``"""
    return math.exp(-0.5 * z * z) / SQRT_2PI

def gauss_upper_tail(z: float) -> float:
    """``P(Z > z)`` through the complementary error function (no ``1 - cdf`` cancellation)"""
    return 0.5 * float(special.erfc(z / SQRT_2))

def mills_ratio(u: float) -> float:
    """``P(Z > u) / phi(u)`` via the scaled complementary error function; finite for u >= 0"""
    return SQRT_HALF_PI * float(special.erfcx(u / SQRT_2))

def _scaled_forward(x: np.ndarray, mills: np.ndarray, order: int) -> list:
    scaled = [mills]
    if order >= 1:
        scaled.append(1.0 - x * mills)
    for k in range(2, order + 1):
        scaled.append((k - 1) * scaled[k - 2] - x * scaled[k - 1])
    return scaled

def _scaled_backward(x: np.ndarray, mills: np.ndarray, order: int) -> list:
    """Scaled moments from the ratios ``r_k = J_k / J_{k-1}``.

    ``r_{k-1} = (k - 1) / (u + r_k)`` is the continued fraction of the Mills ratio;
    run downwards from ``r = 0`` it converges to every ratio at full relative precision.
    """
    ratios = [None] * (order + 1)
    ratio = np.zeros_like(x)
    for k in range(order + CONTINUED_FRACTION_DEPTH, 1, -1):
        ratio = (k - 1) / (x + ratio)
        if k - 1 <= order:
            ratios[k - 1] = ratio
    scaled = [mills]
    for k in range(1, order + 1):
        scaled.append(scaled[k - 1] * ratios[k])
    return scaled

def upper_partial_moments(u, order: int = 4) -> list:
    """``E[(Z - u) ** k ; Z > u]`` for ``k = 0..order``; scalar or array ``u``.

    Uses ``J_0 = P(Z > u)``, ``J_1 = phi(u) - u J_0`` and
    ``J_k = (k - 1) J_{k-2} - u J_{k-1}``. For ``u >= 0`` the moments are carried divided
    by ``phi(u)`` and the density is applied last, so nothing underflows before the result
    does. The forward recursion loses about ``u ** (k + 1)`` ulps in ``J_k``; past
    ``BACKWARD_FROM`` the ratios of consecutive moments are taken from the continued
    fraction instead.
    """
    values = np.asarray(u, dtype=np.float64)
    scalar = values.ndim == 0
    values = np.atleast_1d(values)
    moments = np.empty((order + 1, values.size))

    upper = values >= 0
    if np.any(upper):
        x = values[upper]
        mills = SQRT_HALF_PI * special.erfcx(x / SQRT_2)
        scaled = np.empty((order + 1, x.size))
        far = x > BACKWARD_FROM
        if np.any(~far):
            scaled[:, ~far] = np.array(_scaled_forward(x[~far], mills[~far], order))
        if np.any(far):
            scaled[:, far] = np.array(_scaled_backward(x[far], mills[far], order))
        density = np.exp(-0.5 * x * x) / SQRT_2PI
        moments[:, upper] = density * scaled

    lower = ~upper
    if np.any(lower):
        x = values[lower]
        direct = [0.5 * special.erfc(x / SQRT_2)]
        if order >= 1:
            direct.append(np.exp(-0.5 * x * x) / SQRT_2PI - x * direct[0])
        for k in range(2, order + 1):
            direct.append((k - 1) * direct[k - 2] - x * direct[k - 1])
        moments[:, lower] = np.array(direct)

    if scalar:
        return [float(row[0]) for row in moments]
    return list(moments)

def truncated_chi2_upper(size, threshold: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``Z ** 2`` conditionally on ``Z ** 2 > threshold`` by inverting the upper tail"""
    tail = gauss_upper_tail(math.sqrt(threshold))
    uniforms = 1.0 - rng.random(size)
    # P(|Z| > sqrt(t)) = 2 * tail; pick the magnitude with upper tail probability u * tail
    magnitudes = -special.ndtri(uniforms * tail)
    return magnitudes ** 2
