from __future__ import annotations

import math

from gsm.analytics.moments import ThresholdKind
from gsm.estimators.estimator_spec import EstimatorName, EstimatorSpec, Provenance
from gsm.estimators.schedule import ThresholdSchedule
from gsm.model.ball import BallSpec
from gsm.model.coefficients import NoiseLevel
from gsm.utils.functional import largest_doubling, safe_floor

# growth exponent of the default truncation length for the infinite-tail estimators
DEFAULT_TRUNCATION_GAMMA = 2.0


def _as_noise(n: NoiseLevel | float) -> NoiseLevel:
    return n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))

def _require_log(noise: NoiseLevel) -> float:
    if not noise.n > 1:
        raise ValueError(f'The named estimators use m = n / log n and need n > 1, got {noise.n}')
    return math.log(noise.n)

def _require_ball(name: str, ball: BallSpec | None) -> BallSpec:
    if ball is None:
        raise ValueError(f'Estimator {name} depends on the smoothness of the ball; pass a ball')
    return ball

def _m_from(value: float) -> int:
    return max(1, safe_floor(value))

def parametric_m(n: NoiseLevel | float) -> int:
    """``m = max(1, floor(n / log n))``, the quadratic-part length of Q1, Q2 and Q4"""
    noise = _as_noise(n)
    return _m_from(noise.n / _require_log(noise))

def efficient_bound(ball: BallSpec, n: NoiseLevel | float) -> float:
    """``n ** (1/(4s)) * log n``, the end of the Q2 and Q3 thresholded range"""
    noise = _as_noise(n)
    return noise.n ** (1.0 / (4.0 * ball.s)) * _require_log(noise)

def nonparametric_m(ball: BallSpec, n: NoiseLevel | float) -> int:
    """``m_3 = floor(n ** (p / (1 + 2ps)))``"""
    noise = _as_noise(n)
    return _m_from(noise.n ** (ball.p / (1.0 + 2.0 * ball.p * ball.s)))

def truncation_length(m: int, n: NoiseLevel | float, gamma: float = DEFAULT_TRUNCATION_GAMMA) -> int:
    """End of the adaptive schedule ``2**J m`` with ``J`` maximal under ``n ** gamma * log n``"""
    noise = _as_noise(n)
    return m * 2 ** largest_doubling(m, noise.n ** gamma * _require_log(noise))

def truncated_quadratic(n: NoiseLevel | float, s: float) -> EstimatorSpec:
    """Rate-optimal quadratic reference ``Q1(m_q)`` with ``m_q = floor(n ** (2 / (1 + 4s)))``"""
    noise = _as_noise(n)
    if not s > 0:
        raise ValueError(f'Smoothness s must be positive, got {s}')
    m = _m_from(noise.n ** (2.0 / (1.0 + 4.0 * s)))
    return EstimatorSpec.q1(m, Provenance(EstimatorName.TRUNCATED, n=noise.n))

def _thresh(name: str, m: int, j_star: int, kind: str, noise: NoiseLevel, **provenance) -> EstimatorSpec:
    schedule = ThresholdSchedule(m, j_star, kind, noise)
    return EstimatorSpec.thresh(schedule, Provenance(name, n=noise.n, **provenance))

def _default_tilde_base(ball: BallSpec) -> str:
    efficient = ball.p >= 2 or ball.alpha > 1.0 / (2.0 * ball.p)
    return EstimatorName.Q2 if efficient else EstimatorName.Q3

def make_estimator(
    name: str,
    ball: BallSpec | None,
    n: NoiseLevel | float,
    gamma: float | None = None,
    r: float | None = None,
    m_override: int | None = None,
    length: int | None = None,
    base: str | None = None,
    tail_kind: str = ThresholdKind.SOFT,
) -> EstimatorSpec:
    """Build a named estimator with its tuning parameters resolved for ``n``.

    Args:
        name: one of ``q1, q2, q3, q4, q5, q6, qtilde, truncated``
        ball: parameter space; needed by the estimators tuned to its smoothness
        n: noise level
        gamma: growth exponent of the Q4 thresholded range, ``gamma > 1``
        r: target rate of Q6, ``0 < r < 1``
        m_override: replaces the formula for the quadratic-part length
        length: truncation point of the infinite tails of Q5 and Q6
        base: for ``qtilde``, the soft estimator whose choice of m and J is copied
            (``q2``, ``q3`` or ``q5``); defaults to q2 in the efficient region, else q3
        tail_kind: soft or hard thresholding for q2..q6

    Returns:
        a fully resolved ``EstimatorSpec``
    """
    noise = _as_noise(n)
    if m_override is not None and m_override < 1:
        raise ValueError(f'm_override must be a positive integer, got {m_override}')

    if name == EstimatorName.Q1:
        m = m_override or parametric_m(noise)
        return EstimatorSpec.q1(m, Provenance(name, n=noise.n, ball=ball))

    if name == EstimatorName.TRUNCATED:
        ball = _require_ball(name, ball)
        spec = truncated_quadratic(noise, ball.s)
        if m_override is not None:
            return EstimatorSpec.q1(m_override, spec.provenance)
        return spec

    if name == EstimatorName.Q2:
        ball = _require_ball(name, ball)
        m = m_override or parametric_m(noise)
        j_star = largest_doubling(m, efficient_bound(ball, noise))
        return _thresh(name, m, j_star, tail_kind, noise, ball=ball)

    if name == EstimatorName.Q3:
        ball = _require_ball(name, ball)
        m = m_override or nonparametric_m(ball, noise)
        j_star = largest_doubling(m, efficient_bound(ball, noise))
        return _thresh(name, m, j_star, tail_kind, noise, ball=ball)

    if name == EstimatorName.Q4:
        if gamma is None or not gamma > 1:
            raise ValueError(f'Q4 needs gamma > 1, got {gamma}')
        m = m_override or parametric_m(noise)
        j_star = largest_doubling(m, noise.n ** gamma * _require_log(noise))
        return _thresh(name, m, j_star, tail_kind, noise, ball=ball, gamma=gamma)

    if name in (EstimatorName.Q5, EstimatorName.Q6):
        if name == EstimatorName.Q5:
            m = m_override or parametric_m(noise)
        else:
            if r is None or not 0 < r < 1:
                raise ValueError(f'Q6 needs 0 < r < 1, got {r}')
            m = m_override or _m_from(noise.n ** (2.0 - r))
        if length is None:
            length = truncation_length(m, noise)
        if length < m:
            raise ValueError(f'Truncation length {length} is shorter than m = {m}')
        j_star = largest_doubling(m, float(length))
        return _thresh(name, m, j_star, tail_kind, noise, ball=ball, r=r, length=int(length))

    if name == EstimatorName.QTILDE:
        ball = _require_ball(name, ball)
        base = base or _default_tilde_base(ball)
        if base not in (EstimatorName.Q2, EstimatorName.Q3, EstimatorName.Q5):
            raise ValueError(f'Unsupported base "{base}" for qtilde. Possible values are q2, q3 and q5')
        soft = make_estimator(base, ball, noise, m_override=m_override, length=length)
        schedule = soft.schedule
        return _thresh(
            name, schedule.m, schedule.j_star, ThresholdKind.HARD, noise,
            ball=ball, length=soft.provenance.length,
        )

    raise ValueError(f'Unsupported estimator "{name}". Possible values are {", ".join(EstimatorName.ALL)}')
