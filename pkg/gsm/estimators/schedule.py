from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gsm.analytics.moments import ThresholdKind, centering_constant
from gsm.model.coefficients import NoiseLevel
from gsm.utils.functional import levels_of, stable_sum


@dataclass(frozen=True)
class Block:
    """Threshold block ``(lower, upper]`` with its threshold level and centering constant"""
    j: int
    lower: int
    upper: int
    tau: float
    centering: float

    @property
    def size(self) -> int:
        return self.upper - self.lower


@dataclass(frozen=True)
class ThresholdSchedule:
    """Block-wise thresholds ``tau_i = 2 * ceil(log2(i / m))`` for ``m < i <= 2**j_star * m``.

    Block ``j`` is ``(2**(j-1) m, 2**j m]`` with ``tau = 2j``; every coordinate of a block
    shares the centering constant ``centering_constant(n, 2j, tail_kind)``.
    Indices are kept as Python integers: schedules may reach far beyond int64.
    """
    m: int
    j_star: int
    tail_kind: str
    n: NoiseLevel
    centerings: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValueError(f'm must be a positive integer, got {self.m}')
        if not isinstance(self.j_star, (int, np.integer)) or self.j_star < 0:
            raise ValueError(f'j_star must be a nonnegative integer, got {self.j_star}')
        if self.tail_kind not in (ThresholdKind.SOFT, ThresholdKind.HARD, ThresholdKind.NONE):
            raise ValueError(
                f'Unsupported tail kind "{self.tail_kind}". Possible values are soft, hard and none'
            )
        if self.tail_kind == ThresholdKind.NONE and self.j_star != 0:
            raise ValueError('A schedule without a tail must have j_star = 0')
        noise = self.n if isinstance(self.n, NoiseLevel) else NoiseLevel(float(self.n))
        object.__setattr__(self, 'n', noise)
        object.__setattr__(self, 'm', int(self.m))
        object.__setattr__(self, 'j_star', int(self.j_star))
        centerings = tuple(
            centering_constant(noise, 2.0 * j, self.tail_kind)
            for j in range(1, self.j_star + 1)
        )
        object.__setattr__(self, 'centerings', centerings)

    @property
    def end(self) -> int:
        """Last thresholded index ``2**j_star * m`` (equals m when the tail is empty)"""
        return self.m * 2 ** self.j_star

    def block_of(self, i: int) -> int:
        """Block number of index ``i``: 0 inside the quadratic part, else ``ceil(log2(i / m))``"""
        if i < 1:
            raise ValueError(f'Indices are 1-based, got {i}')
        return ((int(i) - 1) // self.m).bit_length()

    def tau(self, i: int) -> float:
        j = self.block_of(i)
        if j == 0:
            raise ValueError(f'Index {i} lies in the quadratic part (i <= m = {self.m}) and has no threshold')
        return 2.0 * j

    def centering(self, i: int) -> float:
        j = self.block_of(i)
        if not 1 <= j <= self.j_star:
            raise ValueError(f'Index {i} is outside the thresholded range ({self.m}, {self.end}]')
        return self.centerings[j - 1]

    def blocks_of(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`block_of` for an int64 array of indices"""
        indices = np.asarray(indices, dtype=np.int64)
        quotients = (indices - 1) // self.m
        blocks = np.zeros(indices.shape, dtype=np.int64)
        positive = quotients > 0
        blocks[positive] = levels_of(quotients[positive]) + 1
        return blocks

    def block(self, j: int) -> Block:
        if not 1 <= j <= self.j_star:
            raise ValueError(f'Block {j} is outside 1..{self.j_star}')
        return Block(
            j=j,
            lower=self.m * 2 ** (j - 1),
            upper=self.m * 2 ** j,
            tau=2.0 * j,
            centering=self.centerings[j - 1],
        )

    def blocks(self) -> list[Block]:
        return [self.block(j) for j in range(1, self.j_star + 1)]

    def total_centering(self) -> float:
        """``sum_i centering(i)`` over the whole thresholded range"""
        return stable_sum([block.size * block.centering for block in self.blocks()])
