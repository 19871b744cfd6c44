from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from gsm.model.coefficients import CoefficientVector, NoiseLevel
from gsm.utils.random import RandomStream


@dataclass(frozen=True)
class MixtureSpec:
    """Uniform mixture over vectors with ``k`` spikes of height ``1/sqrt(n)`` among the first ``m`` coordinates"""
    m: int
    n: NoiseLevel
    k: int | None = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f'm must be a positive integer, got {self.m}')
        noise = self.n if isinstance(self.n, NoiseLevel) else NoiseLevel(float(self.n))
        object.__setattr__(self, 'n', noise)
        k = math.isqrt(self.m - 1) + 1 if self.k is None else int(self.k)
        if not 1 <= k <= self.m:
            raise ValueError(f'k must lie in [1, m={self.m}], got {k}')
        object.__setattr__(self, 'm', int(self.m))
        object.__setattr__(self, 'k', k)

    @property
    def height(self) -> float:
        return self.n.sigma


def theta_km_vertex(spec: MixtureSpec, support) -> CoefficientVector:
    support = [int(i) for i in support]
    indices = np.array(sorted(set(support)), dtype=np.int64)
    if indices.size != spec.k or len(support) != spec.k:
        raise ValueError(f'The support must hold exactly k={spec.k} distinct indices')
    if indices[0] < 1 or indices[-1] > spec.m:
        raise ValueError(f'Support indices must lie in 1..{spec.m}')
    return CoefficientVector(indices, np.full(spec.k, spec.height), spec.m)

def sample_mixture(spec: MixtureSpec, stream: RandomStream) -> CoefficientVector:
    """Vertex with a uniformly random ``k``-subset support (partial Fisher-Yates shuffle)"""
    rng = stream.generator()
    positions = np.arange(1, spec.m + 1, dtype=np.int64)
    for i in range(spec.k):
        j = int(rng.integers(i, spec.m))
        positions[i], positions[j] = positions[j], positions[i]
    return theta_km_vertex(spec, positions[:spec.k])
