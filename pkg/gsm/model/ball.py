from __future__ import annotations

from dataclasses import dataclass, replace
import math

import numpy as np

from gsm.model.coefficients import BesovIndex, CoefficientVector
from gsm.utils.functional import levels_of, stable_sum


class BallKind:
    LP = 'lp'
    BESOV = 'besov'


@dataclass(frozen=True)
class BallSpec:
    """Parameter space: an Lp ball ``Lp(alpha, M)`` or a Besov ball ``B^alpha_{p,q}(M)``.

    ``q`` is only meaningful for Besov balls; ``math.inf`` selects the supremum over levels.
    """
    kind: str
    p: float
    alpha: float
    M: float
    q: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in (BallKind.LP, BallKind.BESOV):
            raise ValueError(f'Unsupported ball kind "{self.kind}". Possible values are lp and besov')
        for name in ('p', 'alpha', 'M'):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise ValueError(f'{name} must be a positive finite real, got {value}')
        if self.kind == BallKind.BESOV:
            if self.q is None or not self.q > 0:
                raise ValueError(f'Besov balls need q > 0 (or inf), got {self.q}')
        elif self.q is not None:
            raise ValueError('q is only defined for Besov balls')
        if not self.s > 0:
            raise ValueError(
                f'Smoothness s = alpha + 1/2 - 1/p must be positive, got {self.s} '
                f'(p={self.p}, alpha={self.alpha})'
            )

    @classmethod
    def lp(cls, p: float, alpha: float, M: float = 1.0) -> BallSpec:
        return cls(BallKind.LP, p, alpha, M)

    @classmethod
    def besov(cls, p: float, q: float, alpha: float, M: float = 1.0) -> BallSpec:
        return cls(BallKind.BESOV, p, alpha, M, q=q)

    @property
    def s(self) -> float:
        return self.alpha + 0.5 - 1.0 / self.p

    @property
    def is_quadratically_convex(self) -> bool:
        return self.p >= 2

    def __str__(self) -> str:
        if self.kind == BallKind.LP:
            return f'lp:{self.p:g}:{self.alpha:g}:{self.M:g}'
        return f'besov:{self.p:g}:{self.q:g}:{self.alpha:g}:{self.M:g}'


def _lp_combine(terms: np.ndarray, p: float) -> float:
    """``(sum terms ** p) ** (1/p)`` for nonnegative terms, scaled by the largest term.

    A single nonzero term is returned unchanged, which keeps spike norms exact.
    """
    if terms.size == 0:
        return 0.0
    largest = float(np.max(terms))
    if largest == 0.0:
        return 0.0
    if math.isinf(p):
        return largest
    ratios = terms / largest
    return largest * stable_sum(ratios ** p) ** (1.0 / p)

def _lp_weights(spec: BallSpec, indices: np.ndarray) -> np.ndarray:
    # i ** s, so that the norm is (sum (i**s |theta_i|) ** p) ** (1/p) = (sum i**(ps) |theta_i|**p) ** (1/p)
    return np.exp(spec.s * np.log(indices.astype(np.float64)))

def _level_norms(spec: BallSpec, theta: CoefficientVector) -> tuple[np.ndarray, np.ndarray]:
    """Weighted level norms ``2**(js) * ||theta_j.||_p`` for every level touched by the support"""
    if theta.support_size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    levels = levels_of(theta.indices)
    magnitudes = np.abs(theta.values)
    unique_levels, starts = np.unique(levels, return_index=True)
    bounds = list(starts[1:]) + [levels.size]
    norms = np.array([
        _lp_combine(magnitudes[start:stop], spec.p)
        for start, stop in zip(starts, bounds)
    ])
    return unique_levels, norms * np.exp2(unique_levels * spec.s)

def ball_norm(spec: BallSpec, theta: CoefficientVector) -> float:
    """Sequence norm of ``theta`` for the ball; coordinates beyond the support are zero"""
    if theta.support_size == 0:
        return 0.0
    if spec.kind == BallKind.LP:
        return _lp_combine(_lp_weights(spec, theta.indices) * np.abs(theta.values), spec.p)
    _, level_norms = _level_norms(spec, theta)
    return _lp_combine(level_norms, spec.q)

def contains(spec: BallSpec, theta: CoefficientVector) -> bool:
    """Membership ``ball_norm <= M`` with no tolerance"""
    return ball_norm(spec, theta) <= spec.M

def quadratic_hull(spec: BallSpec) -> BallSpec:
    """Quadratically convex hull: the ``p = 2`` ball of smoothness ``s`` (identity for ``p >= 2``)"""
    if spec.is_quadratically_convex:
        return spec
    return replace(spec, p=2.0, alpha=spec.s)

def _flat_position(spec: BallSpec, position: int | BesovIndex) -> int:
    if isinstance(position, BesovIndex):
        return position.flat
    if position < 1:
        raise ValueError(f'Positions are 1-based, got {position}')
    return int(position)

def spike_height(spec: BallSpec, position: int | BesovIndex) -> float:
    """Largest height of a single coefficient at ``position`` that stays inside the ball"""
    i = _flat_position(spec, position)
    # same numpy expressions as ball_norm, so that height * weight is reproduced bit for bit
    if spec.kind == BallKind.LP:
        weight = float(_lp_weights(spec, np.array([i], dtype=np.int64))[0])
    else:
        weight = float(np.exp2(np.array([BesovIndex.from_flat(i).j]) * spec.s)[0])
    height = spec.M / weight
    # M / w * w may round one ulp above M; step down until the membership test is sharp
    while height * weight > spec.M:
        height = math.nextafter(height, 0.0)
    return height

def spike_config(spec: BallSpec, position: int | BesovIndex) -> CoefficientVector:
    """Single coefficient at ``position`` with height chosen so the ball norm is M"""
    i = _flat_position(spec, position)
    return CoefficientVector.spike(i, spike_height(spec, i))

def tail_energy_bound(spec: BallSpec, length: int) -> float:
    """Upper bound on ``sup_{theta in ball} sum_{i > length} theta_i ** 2``"""
    if length < 1:
        return spec.M ** 2
    if spec.kind == BallKind.LP:
        if spec.p <= 2:
            return spec.M ** 2 * length ** (-2.0 * spec.s)
        # Hoelder with exponents p/2 and p/(p-2) against the weights i**(-2s)
        decay = 2.0 * spec.alpha * spec.p / (spec.p - 2.0)
        return spec.M ** 2 * length ** (-2.0 * spec.alpha) * (1.0 / decay) ** ((spec.p - 2.0) / spec.p)
    first_level = int(length).bit_length() - 1
    rate = spec.s if spec.p <= 2 else spec.alpha
    return spec.M ** 2 * 2.0 ** (-2.0 * first_level * rate) / (1.0 - 2.0 ** (-2.0 * rate))
