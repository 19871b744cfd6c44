from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from gsm.model.ball import BallKind, BallSpec, quadratic_hull, spike_height
from gsm.model.coefficients import NoiseLevel
from gsm.utils.functional import levels_of

MAX_DIM = 6
MAX_GRID_STEP = 1e-2
MAX_GRID_POINTS = 10 ** 9


@dataclass(frozen=True)
class HullCheck:
    """Grid maxima of a diagonal rule's risk over a ball, its quadratic hull and their vertices"""
    sup_ball: float
    sup_hull: float
    sup_vertices: float
    tolerance: float

    @property
    def holds(self) -> bool:
        return (
            abs(self.sup_ball - self.sup_hull) <= self.tolerance
            and abs(self.sup_vertices - self.sup_ball) <= self.tolerance
            and abs(self.sup_vertices - self.sup_hull) <= self.tolerance
        )


class _DiagonalRisk:
    """Risk of ``sum a_i Y_i**2 + c`` as a function of the squared coordinates ``u = theta**2``"""

    def __init__(self, a: np.ndarray, c: float, noise: NoiseLevel) -> None:
        self.a = a
        self.offset = float(np.sum(a)) / noise.n + c
        self.variance_floor = 2.0 * float(np.sum(a * a)) / noise.n ** 2
        self.slopes = a - 1.0
        self.variance_slopes = 4.0 * a * a / noise.n

    def __call__(self, squares: list[np.ndarray]) -> np.ndarray:
        bias = self.offset
        variance = self.variance_floor
        for slope, variance_slope, u in zip(self.slopes, self.variance_slopes, squares):
            bias = bias + slope * u
            variance = variance + variance_slope * u
        return bias * bias + variance

    def lipschitz_tolerance(self, box: np.ndarray, step: float) -> float:
        """``sum_i step * sup |d risk / d theta_i|`` over the box ``[0, box_i]``"""
        max_bias = abs(self.offset) + float(np.sum(np.abs(self.slopes) * box ** 2))
        gradients = 2.0 * box * (2.0 * max_bias * np.abs(self.slopes) + self.variance_slopes)
        return step * float(np.sum(gradients))


def _norm_weights(spec: BallSpec, dim: int):
    """Per-coordinate weights ``w_i`` such that the norm combines ``(w_i theta_i)``"""
    indices = np.arange(1, dim + 1, dtype=np.int64)
    if spec.kind == BallKind.LP:
        return np.exp(spec.s * np.log(indices.astype(np.float64))), None
    levels = levels_of(indices)
    return np.exp2(levels * spec.s), levels

def _membership(spec: BallSpec, coordinates: list[np.ndarray], dim: int) -> np.ndarray:
    weights, levels = _norm_weights(spec, dim)
    p = spec.p
    if spec.kind == BallKind.LP:
        total = sum((weights[i] * coordinates[i]) ** p for i in range(dim))
        return total <= spec.M ** p
    level_norms = []
    for level in np.unique(levels):
        members = np.flatnonzero(levels == level)
        inner = sum((weights[i] * coordinates[i]) ** p for i in members)
        level_norms.append(inner ** (1.0 / p))
    if math.isinf(spec.q):
        return np.maximum.reduce(level_norms) <= spec.M
    return sum(norm ** spec.q for norm in level_norms) <= spec.M ** spec.q

def _grid_supremum(spec: BallSpec, risk: _DiagonalRisk, axes: list[np.ndarray]) -> float:
    dim = len(axes)
    best = -math.inf
    rest = np.meshgrid(*axes[1:], indexing='ij') if dim > 1 else []
    for value in axes[0]:
        coordinates = [np.full(rest[0].shape if rest else (1,), value)] + list(rest)
        inside = _membership(spec, coordinates, dim)
        if not np.any(inside):
            continue
        values = risk([c * c for c in coordinates])
        best = max(best, float(np.max(values[inside])))
    return best

def hull_sup_equality(
    a,
    c: float,
    ball: BallSpec,
    dim: int,
    grid_step: float,
    n: NoiseLevel | float = 1.0,
) -> HullCheck:
    """Brute-force maxima of a diagonal quadratic rule's risk over ``ball``, its hull and the vertices.

    The rule's risk depends on ``theta`` through ``theta**2`` only, so the search runs over
    the nonnegative orthant. Both sets are solid there: rounding a member down to the grid
    keeps it a member, which turns the grid step into the certified ``tolerance``.
    """
    if ball.p >= 2:
        raise ValueError(f'The hull check needs a ball with p < 2, got p={ball.p}')
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f'dim must lie in 1..{MAX_DIM}, got {dim}')
    if not 0 < grid_step <= MAX_GRID_STEP:
        raise ValueError(f'grid_step must lie in (0, {MAX_GRID_STEP}], got {grid_step}')
    noise = n if isinstance(n, NoiseLevel) else NoiseLevel(float(n))
    coefficients = np.zeros(dim)
    a = np.asarray(a, dtype=np.float64).ravel()
    if a.size > dim:
        raise ValueError(f'{a.size} coefficients do not fit in dimension {dim}')
    coefficients[:a.size] = a
    risk = _DiagonalRisk(coefficients, float(c), noise)

    hull = quadratic_hull(ball)
    box = np.array([max(spike_height(ball, i), spike_height(hull, i)) for i in range(1, dim + 1)])
    axes = [np.arange(0.0, height + grid_step / 2, grid_step) for height in box]
    axes = [axis[axis <= height] for axis, height in zip(axes, box)]
    points = math.prod(axis.size for axis in axes)
    if points > MAX_GRID_POINTS:
        raise ValueError(f'The grid has {points} points; the limit is {MAX_GRID_POINTS}')

    vertices = [np.zeros(dim)]
    for i in range(dim):
        vertex = np.zeros(dim)
        vertex[i] = spike_height(ball, i + 1)
        vertices.append(vertex)
    sup_vertices = max(float(risk([np.array([v * v]) for v in vertex])[0]) for vertex in vertices)

    return HullCheck(
        sup_ball=_grid_supremum(ball, risk, axes),
        sup_hull=_grid_supremum(hull, risk, axes),
        sup_vertices=sup_vertices,
        tolerance=risk.lipschitz_tolerance(box, grid_step),
    )
