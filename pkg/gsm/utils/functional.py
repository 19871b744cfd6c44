import math

import numpy as np

# relative slack applied before flooring, so that e.g. 1024 ** 1.2 == 4095.9999...
# still floors to 4096
FLOOR_RTOL = 1e-12


def safe_floor(x: float) -> int:
    """Floor of ``x`` that is robust to the last-ulp rounding of ``pow``/``exp``"""
    return math.floor(x * (1.0 + FLOOR_RTOL) if x > 0 else x)

def stable_sum(values) -> float:
    """Correctly rounded sum, independent of the order in which chunks were produced"""
    return math.fsum(np.asarray(values, dtype=np.float64).ravel().tolist())

def largest_doubling(m: int, bound: float) -> int:
    """Largest integer ``j >= 0`` with ``2**j * m <= bound`` (0 when even ``j = 1`` fails)"""
    if m <= 0:
        raise ValueError(f'm must be a positive integer, got {m}')
    if bound < 2 * m:
        return 0
    j = max(safe_floor(math.log2(bound / m)), 0)
    while m * 2 ** (j + 1) <= bound:
        j += 1
    while j > 0 and m * 2 ** j > bound:
        j -= 1
    return j

def levels_of(indices: np.ndarray) -> np.ndarray:
    """Resolution level ``j = floor(log2(i))`` of 1-based flat indices, exact for int64"""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        return np.zeros(0, dtype=np.int64)
    levels = np.floor(np.log2(indices.astype(np.float64))).astype(np.int64)
    # 2**63 is not an int64; every positive int64 lies below it
    np.minimum(levels, 62, out=levels)
    # float rounding can push the estimate one level off near powers of two
    too_high = np.left_shift(np.int64(1), levels) > indices
    levels[too_high] -= 1
    too_low = (levels < 62) & (np.left_shift(np.int64(1), np.minimum(levels + 1, 62)) <= indices)
    levels[too_low] += 1
    return levels

def parse_grid(text: str) -> list[float]:
    """Parse ``start:stop:step`` (inclusive) or a comma separated list into floats"""
    text = text.strip()
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f'Grid "{text}" must have the form start:stop:step')
        start, stop, step = (float(part) for part in parts)
        if step <= 0 or stop < start:
            raise ValueError(f'Grid "{text}" needs step > 0 and stop >= start')
        count = int(round((stop - start) / step)) + 1
        return [round(start + step * idx, 12) for idx in range(count)]
    return [float(part) for part in text.split(',') if part.strip()]
