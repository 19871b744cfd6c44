from __future__ import annotations


def omega_r_alpha(p: float, r: float) -> float:
    """Smoothness ``alpha`` at which the minimax rate over ``Lp(alpha)`` is ``n ** -r``.

    Solves ``p / (1 + 2ps) = 2 - r`` for ``s`` and returns ``alpha = s - 1/2 + 1/p``;
    the point must lie in the nonparametric region ``0 < alpha < 1/(2p)``.
    """
    if not 0 < r < 1:
        raise ValueError(f'r must lie in (0, 1), got {r}')
    if not 0 < p < 2:
        raise ValueError(f'p must lie in (0, 2), got {p}')
    s = (p / (2.0 - r) - 1.0) / (2.0 * p)
    if not s > 0:
        raise ValueError(f'No smoothness s > 0 gives the rate n^-{r} for p={p}; need r > 2 - p')
    alpha = s - 0.5 + 1.0 / p
    if not 0 < alpha < 1.0 / (2.0 * p):
        raise ValueError(f'alpha={alpha} solving the rate equation is outside (0, 1/(2p)) for p={p}, r={r}')
    return alpha

def q4_efficiency_region(p: float, gamma: float) -> float:
    """Smoothness above which the adaptive estimator with range ``n**gamma log n`` is fully efficient"""
    if not 0 < p < 2:
        raise ValueError(f'p must lie in (0, 2), got {p}')
    if not gamma > 1:
        raise ValueError(f'gamma must exceed 1, got {gamma}')
    half_inverse = 1.0 / (2.0 * p)
    return half_inverse + max(half_inverse - 0.5 + 1.0 / (4.0 * gamma), 0.0)
