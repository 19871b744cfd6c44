from __future__ import annotations

import math

import numpy as np
from scipy import special, stats

# 4 e^(e - 1), the limit of the affinity bound along k = ceil(sqrt(m))
AFFINITY_CEILING = 4.0 * math.exp(math.e - 1.0)


def default_spike_count(m: int) -> int:
    """``k = ceil(sqrt(m))``"""
    return math.isqrt(m - 1) + 1 if m > 0 else 0

def hypergeometric_log_pmf(m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Support and log-pmf of the overlap of two independent uniform ``k``-subsets of ``{1..m}``"""
    if not 0 <= k <= m:
        raise ValueError(f'Need 0 <= k <= m, got k={k}, m={m}')
    support = np.arange(max(0, 2 * k - m), k + 1)
    return support, stats.hypergeom(m, k, k).logpmf(support)

def chi_square_affinity(m: int, k: int) -> float:
    """``E exp(J)`` for the hypergeometric overlap ``J``, summed in the log domain"""
    support, log_pmf = hypergeometric_log_pmf(m, k)
    return float(np.exp(special.logsumexp(log_pmf + support)))

def affinity_bound(m: int, k: int | None = None) -> float:
    """``4 (1 + (e - 1) k / m) ** k``"""
    if m < 4:
        raise ValueError(f'The affinity bound needs m >= 4, got {m}')
    k = default_spike_count(m) if k is None else k
    if not 1 <= k < m:
        raise ValueError(f'The affinity bound needs 1 <= k < m, got k={k}, m={m}')
    return 4.0 * (1.0 + (math.e - 1.0) * k / m) ** k

def cri_lower_bound(delta: float, eps2: float, affinity: float) -> float:
    """Constrained risk inequality: risk at the mixture is at least ``delta**2 - 2 delta sqrt(affinity eps2)``.

    The raw value is returned; it may be negative.
    """
    if not delta >= 0:
        raise ValueError(f'delta must be nonnegative, got {delta}')
    if not eps2 >= 0:
        raise ValueError(f'eps2 must be nonnegative, got {eps2}')
    if not affinity >= 1:
        raise ValueError(f'A chi-square affinity is at least 1, got {affinity}')
    return delta * delta - 2.0 * delta * math.sqrt(affinity * eps2)

def mixture_cri_bound(m: int, n: float, c: float, k: int | None = None, affinity: float = AFFINITY_CEILING) -> float:
    """CRI value for the spike mixture: ``delta = k/n`` and null risk ``eps2 = c m / n**2``"""
    k = default_spike_count(m) if k is None else k
    return cri_lower_bound(k / n, c * m / n ** 2, affinity)

def mixture_risk_floor(m: int, n: float, c: float) -> float:
    """``(1/4 - 2 e^((e-1)/2) sqrt(c)) m / n**2``, the closed-form floor the CRI value dominates"""
    return (0.25 - 2.0 * math.exp((math.e - 1.0) / 2.0) * math.sqrt(c)) * m / n ** 2
