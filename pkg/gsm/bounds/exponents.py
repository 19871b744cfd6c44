from __future__ import annotations

from gsm.model.coefficients import CoefficientVector, NoiseLevel, quadratic_functional


def smoothness(p: float, alpha: float) -> float:
    if not p > 0 or not alpha > 0:
        raise ValueError(f'p and alpha must be positive, got p={p}, alpha={alpha}')
    s = alpha + 0.5 - 1.0 / p
    if not s > 0:
        raise ValueError(f'Smoothness s = alpha + 1/2 - 1/p must be positive, got {s} (p={p}, alpha={alpha})')
    return s

def quadratic_exponent(p: float, alpha: float) -> float:
    """Rate exponent of the best quadratic rule: ``min(1, 8s/(1+4s))`` with ``s = alpha`` for p >= 2"""
    s = smoothness(p, alpha)
    rate = alpha if p >= 2 else s
    return min(1.0, 8.0 * rate / (1.0 + 4.0 * rate))

def minimax_lower_exponent(p: float, alpha: float) -> float:
    """Exponent ``r`` of the minimax lower bound ``n ** -r``.

    For ``p < 2`` it is 1 above ``alpha = 1/(2p)`` and ``2 - p/(1+2ps)`` at or below it;
    for ``p >= 2`` the quadratic rate ``min(1, 8 alpha/(1 + 4 alpha))`` is sharp.
    """
    s = smoothness(p, alpha)
    if p >= 2:
        return quadratic_exponent(p, alpha)
    if alpha > 1.0 / (2.0 * p):
        return 1.0
    return 2.0 - p / (1.0 + 2.0 * p * s)

def information_bound(theta: CoefficientVector, n: NoiseLevel | float) -> float:
    """Inverse Fisher information ``4 Q(theta) / n``"""
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    return 4.0 * quadratic_functional(theta) / noise.n
