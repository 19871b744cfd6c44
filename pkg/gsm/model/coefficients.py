from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from gsm.utils.functional import stable_sum
from gsm.utils.random import RandomStream

INDEX_LIMIT = int(np.iinfo(np.int64).max)


@dataclass(frozen=True)
class NoiseLevel:
    """Calibration ``n`` of the sequence model; each coordinate has noise sd ``n ** -0.5``"""
    n: float

    def __post_init__(self) -> None:
        if not (isinstance(self.n, (int, float)) and math.isfinite(self.n) and self.n > 0):
            raise ValueError(f'Noise level n must be a positive finite real, got {self.n}')

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(self.n)

    @property
    def variance(self) -> float:
        return 1.0 / self.n

    def __float__(self) -> float:
        return float(self.n)


@dataclass(frozen=True)
class BesovIndex:
    """Position ``(j, k)`` of a doubly indexed coefficient, flat index ``i = 2**j + k``"""
    j: int
    k: int

    def __post_init__(self) -> None:
        if self.j < 0 or not 0 <= self.k < 2 ** self.j:
            raise ValueError(f'Invalid Besov index (j={self.j}, k={self.k}); need j >= 0 and 0 <= k < 2**j')

    @property
    def flat(self) -> int:
        return 2 ** self.j + self.k

    @classmethod
    def from_flat(cls, i: int) -> BesovIndex:
        if i < 1:
            raise ValueError(f'Flat index must be >= 1, got {i}')
        j = int(i).bit_length() - 1
        return cls(j, int(i) - 2 ** j)


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Finite truncation of a mean sequence (or an observation) with zero tail.

    Only the support is stored: ``indices`` are sorted, unique and 1-based, ``values``
    are the matching coordinates. ``length`` is the nominal N; every coordinate outside
    the support, and every coordinate beyond N, is exactly zero.
    """
    indices: np.ndarray
    values: np.ndarray
    length: int
    _dense: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        indices = np.asarray(self.indices, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if indices.shape != values.shape:
            raise ValueError('indices and values must have the same length')
        if not np.all(np.isfinite(values)):
            raise ValueError('All coefficient values must be finite')
        if indices.size > 0:
            if np.any(np.diff(indices) <= 0):
                order = np.argsort(indices, kind='stable')
                indices, values = indices[order], values[order]
                if np.any(np.diff(indices) == 0):
                    raise ValueError('Duplicate coefficient indices')
            if indices[0] < 1:
                raise ValueError('Coefficient indices are 1-based')
            if indices[-1] > self.length:
                raise ValueError(f'Index {indices[-1]} exceeds the nominal length {self.length}')
        if self.length < 0:
            raise ValueError(f'Length must be nonnegative, got {self.length}')
        keep = values != 0.0
        object.__setattr__(self, 'indices', indices[keep])
        object.__setattr__(self, 'values', values[keep])
        object.__setattr__(self, 'length', int(self.length))

    @classmethod
    def from_dense(cls, values, length: int | None = None) -> CoefficientVector:
        dense = np.asarray(values, dtype=np.float64).ravel()
        length = dense.size if length is None else length
        if length < dense.size:
            raise ValueError(f'Length {length} is shorter than the {dense.size} given values')
        nonzero = np.flatnonzero(dense)
        vector = cls(nonzero + 1, dense[nonzero], length)
        if length == dense.size:
            object.__setattr__(vector, '_dense', dense.copy())
        return vector

    @classmethod
    def zeros(cls, length: int = 0) -> CoefficientVector:
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0), length)

    @classmethod
    def spike(cls, index: int, height: float, length: int | None = None) -> CoefficientVector:
        length = index if length is None else length
        return cls(np.array([index]), np.array([height]), length)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> float:
        """1-based coordinate access; indices beyond the support read as zero"""
        pos = np.searchsorted(self.indices, i)
        if pos < self.indices.size and self.indices[pos] == i:
            return float(self.values[pos])
        return 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return (
            self.length == other.length
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def support_size(self) -> int:
        return int(self.indices.size)

    @property
    def max_index(self) -> int:
        """Largest index carrying a nonzero value (0 for the zero vector)"""
        return int(self.indices[-1]) if self.indices.size > 0 else 0

    def to_dense(self, length: int | None = None) -> np.ndarray:
        length = self.length if length is None else length
        if self._dense is not None and length == self.length:
            return self._dense.copy()
        if self.max_index > length:
            raise ValueError(f'Cannot materialise {self.max_index} coordinates into length {length}')
        dense = np.zeros(length, dtype=np.float64)
        dense[self.indices - 1] = self.values
        return dense

    def scale(self, factor: float) -> CoefficientVector:
        return CoefficientVector(self.indices, self.values * factor, self.length)

    def with_length(self, length: int) -> CoefficientVector:
        return CoefficientVector(self.indices, self.values, length)

    def restrict(self, lower: int, upper: int) -> tuple[np.ndarray, np.ndarray]:
        """Support entries with ``lower < i <= upper``"""
        # bounds may be Python ints past int64; stored indices never are
        lower, upper = min(int(lower), INDEX_LIMIT), min(int(upper), INDEX_LIMIT)
        start = np.searchsorted(self.indices, lower, side='right')
        stop = np.searchsorted(self.indices, upper, side='right')
        return self.indices[start:stop], self.values[start:stop]


def quadratic_functional(theta: CoefficientVector) -> float:
    """``Q(theta) = sum theta_i ** 2``"""
    return stable_sum(theta.values ** 2)

def sample_observation(
    theta: CoefficientVector,
    n: NoiseLevel,
    length: int,
    stream: RandomStream,
) -> CoefficientVector:
    """Draw ``Y_i = theta_i + n ** -0.5 * z_i`` for ``i <= length``.

    The draws depend on ``stream`` only, so the same stream id reproduces the same
    vector bit for bit.
    """
    if length < theta.max_index:
        raise ValueError(f'Observation length {length} does not cover the support of theta (up to {theta.max_index})')
    noise = stream.generator().standard_normal(length)
    observation = noise * n.sigma
    observation[theta.indices - 1] += theta.values
    return CoefficientVector.from_dense(observation)
