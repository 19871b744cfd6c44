from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score

from gsm.bounds.exponents import minimax_lower_exponent, quadratic_exponent, smoothness


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


def rate_fit(points) -> RateFit:
    """Least-squares line through ``(log n, log risk)``"""
    points = tuple((float(n), float(risk)) for n, risk in points)
    if len(points) < 3:
        raise ValueError(f'A rate fit needs at least 3 points, got {len(points)}')
    values = np.array(points)
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise ValueError('Every n and risk must be a positive finite real')

    log_n = np.log(values[:, :1])
    log_risk = np.log(values[:, 1])
    model = LinearRegression().fit(log_n, log_risk)
    r_squared = float(r2_score(log_risk, model.predict(log_n))) if np.ptp(log_risk) > 0 else 1.0
    return RateFit(
        slope=float(model.coef_[0]),
        intercept=float(model.intercept_),
        r_squared=min(max(r_squared, 0.0), 1.0),
        points=points,
    )

def table1_exponents(p: float, alpha: float) -> tuple[float, float]:
    """``(r_star, r_q_star)``: exponents of the minimax rate and of the best quadratic rate"""
    smoothness(p, alpha)
    return minimax_lower_exponent(p, alpha), quadratic_exponent(p, alpha)
